#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "clustermorph/stats.hpp"

namespace clustermorph {

inline constexpr std::size_t kTraitCount = 18;

inline constexpr std::array<std::string_view, kTraitCount> kTraitNames = {
    "berry_count",    "berry_area",    "berry_length",      "berry_width",    "compactness",
    "ecdf_x25",       "ecdf_x50",      "ecdf_x75",          "ecdf_y25",       "ecdf_y50",
    "ecdf_y75",       "hull_pc1",      "hull_pc2",          "cluster_length", "cluster_width",
    "cluster_perimeter", "cluster_aspect", "cluster_area"};

/// Index of a trait name; throws StatsError when unknown.
std::size_t trait_index(std::string_view name);

struct TraitKey {
  std::string genotype;
  std::string block;
  std::string vine;
  std::string cluster;
  int angle = 0;

  friend auto operator<=>(const TraitKey&, const TraitKey&) = default;
};

/// One cluster view. Missing traits are NaN.
struct TraitRow {
  TraitKey key;
  std::array<double, kTraitCount> values;

  TraitRow();
};

class TraitTable {
 public:
  /// Throws StatsError on a duplicate key.
  void add(TraitRow row);
  const std::vector<TraitRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  void write_csv(std::ostream& out) const;
  /// Throws ParseError with the 1-based data row on malformed input.
  static TraitTable read_csv(std::istream& in);

 private:
  std::vector<TraitRow> rows_;
  std::map<TraitKey, std::size_t> index_;
};

struct GenotypeSummary {
  std::string genotype;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< NaN for a single observation
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct TraitSummary {
  /// Per trait, genotypes ordered by ascending mean (ties by name).
  std::array<std::vector<GenotypeSummary>, kTraitCount> genotypes;
  /// Pairwise-complete Pearson correlations; NaN where undefined.
  Eigen::MatrixXd correlation;
  std::array<std::optional<RepeatabilityResult>, kTraitCount> repeatability;
  std::vector<std::string> warnings;
};

/// Throws StatsError for an empty table or fewer than two genotypes.
TraitSummary trait_summary(const TraitTable& table, bool block_adjusted = false);

}  // namespace clustermorph
