#pragma once

#include <stdexcept>
#include <string>

namespace clustermorph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run lengths that do not add up to the declared mask size.
class MalformedRleError : public Error {
 public:
  using Error::Error;
};

/// A mask file that does not follow the documented JSON schema.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long record = -1)
      : Error(what), record_(record) {}
  /// Index of the offending record, or -1 for file-level problems.
  long record() const noexcept { return record_; }

 private:
  long record_;
};

/// A record that parses but contradicts its own decoded mask.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

class EmptyMaskError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or otherwise unusable geometry (too few points, zero area, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace clustermorph
