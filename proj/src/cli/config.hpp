#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clustermorph/architecture.hpp"
#include "clustermorph/filter.hpp"

namespace clustermorph::cli {

namespace fs = std::filesystem;

inline constexpr int kConfigSchemaVersion = 1;

/// Everything a pipeline run needs. Paths may come from the config file or
/// from command-line flags (flags win).
struct RunConfig {
  std::vector<fs::path> inputs;  ///< mask files or directories of them
  std::optional<fs::path> metadata;
  fs::path output_dir = "out";
  FilterConfig filter;
  ArchitectureConfig architecture;
  int hull_harmonics = 20;
  std::optional<ReferenceSpec> reference;
  double mm_per_px = 1.0;  ///< used when no reference circle is configured or found
  bool block_adjusted = false;
  bool plots = true;
  int jobs = 1;
  std::optional<fs::path> save_model;

  /// Value ranges only; parse_run_config runs this.
  void check_parameters() const;
  /// Parameter checks plus existence of every input and the metadata file.
  void validate() const;
};

/// `section.key` / value pairs of an INI-style text, file order. Checks
/// schema_version and that every key is in `known`.
std::vector<std::pair<std::string, std::string>> read_key_values(
    std::string_view text, std::span<const std::string_view> known);

double as_double(const std::string& key, const std::string& text);
int as_int(const std::string& key, const std::string& text);
bool as_bool(const std::string& key, const std::string& text);
std::string trim(std::string_view s);

/// INI-style key = value text with a top-level `schema_version = 1` and the
/// sections [run], [filter], [architecture] and [calibration]. Unknown keys
/// are rejected. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

/// Analysis parameters in a fixed order, one `key = value` per line. Paths
/// and the worker count are left out: they do not change the results.
std::string canonical_config(const RunConfig& cfg);

/// FNV-1a over canonical_config.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hex64(std::uint64_t value);

}  // namespace clustermorph::cli
