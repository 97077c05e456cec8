#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace clustermorph {

/// Field quoted only when it holds a comma, quote or line break.
std::string csv_field(std::string_view text);

/// Shortest round-trip decimal form; empty for NaN.
std::string csv_number(double value);

/// Split one record. Quoted fields may contain commas and doubled quotes but
/// not line breaks.
std::vector<std::string> csv_split(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name, or -1.
  long column(std::string_view name) const;
};

/// Header plus rows; blank lines are skipped. Throws ParseError (with the
/// 1-based data row) when a row has a different field count than the header.
CsvTable read_csv(std::istream& in);

/// Parse a number; empty text gives NaN. Throws ParseError otherwise.
double parse_number(std::string_view text, long row = -1);

}  // namespace clustermorph
