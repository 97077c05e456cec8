#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"

namespace clustermorph::cli {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kKnownKeys[] = {
    "schema_version",
    "run.inputs",
    "run.metadata",
    "run.output",
    "run.jobs",
    "run.plots",
    "run.block_adjusted",
    "run.mm_per_px",
    "run.save_model",
    "filter.containment_threshold",
    "filter.min_area_px",
    "filter.max_area_px",
    "filter.max_aspect",
    "filter.max_centroid_distance",
    "filter.pca_rounds",
    "filter.pca_sd",
    "filter.pca_components",
    "filter.harmonics",
    "filter.pca_min_explained",
    "architecture.concavity",
    "architecture.hull_harmonics",
    "calibration.reference_diameter_mm",
    "calibration.reference_min_px",
    "calibration.reference_max_px",
};

fs::path to_path(const std::string& text, const fs::path& base) {
  fs::path p(trim(text));
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double as_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects a number, got '" + t + "'");
  return v;
}

int as_int(const std::string& key, const std::string& text) {
  int v = 0;
  const std::string t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects an integer, got '" + t + "'");
  return v;
}

bool as_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + t + "'");
}

std::vector<std::pair<std::string, std::string>> read_key_values(
    std::string_view text, std::span<const std::string_view> known) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  // flatten one section level and reject anything unknown
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      // an empty [section] looks like a key with no value
      if (node.data().empty() && section != "schema_version") continue;
      entries.emplace_back(section, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) entries.emplace_back(section + "." + key, leaf.data());
  }
  bool has_version = false;
  for (const auto& [key, value] : entries) {
    if (std::find(known.begin(), known.end(), key) == known.end() && key != "schema_version")
      throw ConfigError("unknown config key '" + key + "'");
    if (key == "schema_version") {
      has_version = true;
      if (as_int(key, value) != kConfigSchemaVersion)
        throw ConfigError("unsupported schema_version " + trim(value));
    }
  }
  if (!has_version) throw ConfigError("config is missing schema_version");
  return entries;
}

void RunConfig::check_parameters() const {
  filter.validate();
  if (!(architecture.concavity > 0.0 && architecture.concavity <= 1.0))
    throw ConfigError("concavity must be in (0, 1]");
  if (hull_harmonics < 1) throw ConfigError("hull_harmonics must be at least 1");
  if (!(mm_per_px > 0.0)) throw ConfigError("mm_per_px must be positive");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (reference) {
    if (!(reference->diameter_mm > 0.0)) throw ConfigError("reference_diameter_mm must be positive");
    if (!(reference->min_diameter_px >= 0.0 && reference->min_diameter_px < reference->max_diameter_px))
      throw ConfigError("reference_min_px must be below reference_max_px");
  }
}

void RunConfig::validate() const {
  check_parameters();
  for (const auto& p : inputs)
    if (!fs::exists(p)) throw ConfigError("input does not exist: " + p.string());
  if (metadata && !fs::exists(*metadata))
    throw ConfigError("metadata file does not exist: " + metadata->string());
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
  const auto entries = read_key_values(text, kKnownKeys);

  RunConfig cfg;
  double ref_mm = 0.0, ref_min = 0.0, ref_max = 0.0;
  bool any_ref = false;
  for (const auto& [key, value] : entries) {
    if (key == "run.inputs") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!trim(item).empty()) cfg.inputs.push_back(to_path(item, base_dir));
    } else if (key == "run.metadata") {
      cfg.metadata = to_path(value, base_dir);
    } else if (key == "run.output") {
      cfg.output_dir = to_path(value, base_dir);
    } else if (key == "run.save_model") {
      cfg.save_model = to_path(value, base_dir);
    } else if (key == "run.jobs") {
      cfg.jobs = as_int(key, value);
    } else if (key == "run.plots") {
      cfg.plots = as_bool(key, value);
    } else if (key == "run.block_adjusted") {
      cfg.block_adjusted = as_bool(key, value);
    } else if (key == "run.mm_per_px") {
      cfg.mm_per_px = as_double(key, value);
    } else if (key == "filter.containment_threshold") {
      cfg.filter.containment_threshold = as_double(key, value);
    } else if (key == "filter.min_area_px") {
      cfg.filter.min_area_px = as_double(key, value);
    } else if (key == "filter.max_area_px") {
      cfg.filter.max_area_px = as_double(key, value);
    } else if (key == "filter.max_aspect") {
      cfg.filter.max_aspect = as_double(key, value);
    } else if (key == "filter.max_centroid_distance") {
      cfg.filter.max_centroid_distance = as_double(key, value);
    } else if (key == "filter.pca_rounds") {
      cfg.filter.pca_rounds = as_int(key, value);
    } else if (key == "filter.pca_sd") {
      cfg.filter.pca_sd = as_double(key, value);
    } else if (key == "filter.pca_components") {
      cfg.filter.pca_components = as_int(key, value);
    } else if (key == "filter.harmonics") {
      cfg.filter.harmonics = as_int(key, value);
    } else if (key == "filter.pca_min_explained") {
      cfg.filter.pca_min_explained = as_double(key, value);
    } else if (key == "architecture.concavity") {
      cfg.architecture.concavity = as_double(key, value);
    } else if (key == "architecture.hull_harmonics") {
      cfg.hull_harmonics = as_int(key, value);
    } else if (key == "calibration.reference_diameter_mm") {
      ref_mm = as_double(key, value);
      any_ref = true;
    } else if (key == "calibration.reference_min_px") {
      ref_min = as_double(key, value);
      any_ref = true;
    } else if (key == "calibration.reference_max_px") {
      ref_max = as_double(key, value);
      any_ref = true;
    }
  }
  if (any_ref) cfg.reference = ReferenceSpec{ref_mm, ref_min, ref_max};
  cfg.check_parameters();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto put = [&](std::string_view key, double v) { out << key << " = " << csv_number(v) << '\n'; };
  out << "schema_version = " << kConfigSchemaVersion << '\n';
  put("filter.containment_threshold", cfg.filter.containment_threshold);
  put("filter.min_area_px", cfg.filter.min_area_px);
  put("filter.max_area_px", cfg.filter.max_area_px);
  put("filter.max_aspect", cfg.filter.max_aspect);
  put("filter.max_centroid_distance", cfg.filter.max_centroid_distance);
  put("filter.pca_rounds", cfg.filter.pca_rounds);
  put("filter.pca_sd", cfg.filter.pca_sd);
  put("filter.pca_components", cfg.filter.pca_components);
  put("filter.harmonics", cfg.filter.harmonics);
  put("filter.pca_min_explained", cfg.filter.pca_min_explained);
  put("architecture.concavity", cfg.architecture.concavity);
  put("architecture.hull_harmonics", cfg.hull_harmonics);
  if (cfg.reference) {
    put("calibration.reference_diameter_mm", cfg.reference->diameter_mm);
    put("calibration.reference_min_px", cfg.reference->min_diameter_px);
    put("calibration.reference_max_px", cfg.reference->max_diameter_px);
  }
  put("run.mm_per_px", cfg.mm_per_px);
  out << "run.block_adjusted = " << (cfg.block_adjusted ? "true" : "false") << '\n';
  return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace clustermorph::cli
