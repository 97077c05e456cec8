#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clustermorph/bitgrid.hpp"
#include "clustermorph/geometry.hpp"
#include "clustermorph/mask_file.hpp"
#include "clustermorph/shape.hpp"

namespace clustermorph {

struct FilterConfig {
  /// A mask covering at least this fraction of each of two distinct smaller
  /// masks is treated as a multi-berry mask.
  double containment_threshold = 0.8;
  double min_area_px = 50.0;
  double max_area_px = 5000.0;
  double max_aspect = 2.5;
  /// Distance limit, in cluster radii, from the medoid of mask centroids.
  double max_centroid_distance = 3.0;
  int pca_rounds = 5;
  double pca_sd = 2.0;
  int pca_components = 10;
  int harmonics = 10;
  /// PCs explaining less than this share of the variance are not tested;
  /// they carry rasterisation noise rather than shape differences.
  double pca_min_explained = 0.05;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

enum class Stage { kept, multi_berry, metric, efd_pca };

std::string_view stage_name(Stage stage) noexcept;

struct Disposition {
  std::string id;
  Stage stage = Stage::kept;
  std::string reason;
};

struct FilterReport {
  std::size_t removed_multi = 0;
  std::size_t removed_metric = 0;
  std::size_t removed_efd_pca = 0;
  std::size_t kept = 0;
  std::vector<Disposition> dispositions;  ///< one per input mask, input order
  std::vector<std::string> warnings;

  std::size_t total() const noexcept {
    return removed_multi + removed_metric + removed_efd_pca + kept;
  }
};

/// Index partition of a stage's input. `reasons` is parallel to `removed`.
struct Partition {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> removed;
  std::vector<std::string> reasons;
};

/// Decoded mask with its outline and pixel-unit measurements.
struct PreparedMask {
  BitGrid grid;
  std::optional<Contour> outline;  ///< pixel-edge outline; empty for empty masks
  std::optional<Contour> smooth;   ///< corner-cut outline used for measurements
  ShapeMetrics metrics;            ///< in pixels, from `smooth`
  double area_px = 0.0;
};

PreparedMask prepare_mask(const MaskRecord& record);

/// Pixel area, aspect ratio and centroid: the inputs of the metric filter.
struct MaskMeasure {
  double area_px = 0.0;
  double aspect = 1.0;
  Point centroid;
};

MaskMeasure measure(const PreparedMask& mask);

Partition remove_multi_berry(std::span<const BitGrid> masks, const FilterConfig& cfg);
Partition remove_multi_berry(std::span<const MaskRecord> masks, const FilterConfig& cfg);

Partition metric_filter(std::span<const MaskMeasure> masks, const FilterConfig& cfg);
Partition metric_filter(std::span<const MaskRecord> masks, const FilterConfig& cfg);

struct OutlierResult {
  Partition partition;
  std::vector<int> removed_round;  ///< parallel to partition.removed, 1-based
  int rounds_run = 0;
  bool skipped = false;
  std::string warning;
};

/// Iterated shape-outlier rejection on normalised EFD principal components.
OutlierResult efd_pca_outlier_filter(std::span<const Contour> contours, const FilterConfig& cfg);

struct ReferenceSpec {
  double diameter_mm = 0.0;
  double min_diameter_px = 0.0;
  double max_diameter_px = 0.0;
};

struct ScaleCalibration {
  double mm_per_px = 1.0;
  std::string reference_mask_id;
  double circularity = 0.0;
  double diameter_px = 0.0;
};

/// Minimum circularity for a reference-circle candidate.
inline constexpr double kReferenceCircularity = 0.9;

/// Find the single circular mask with a diameter in the expected range.
/// Throws CalibrationError (listing candidates) when there is not exactly one.
ScaleCalibration detect_reference(std::span<const MaskRecord> masks, const ReferenceSpec& spec);
ScaleCalibration detect_reference(std::span<const MaskRecord> masks,
                                  std::span<const PreparedMask> prepared,
                                  const ReferenceSpec& spec);

struct FilterOutcome {
  std::vector<std::size_t> kept;  ///< indices of the surviving masks
  FilterReport report;
  std::optional<ScaleCalibration> calibration;
  std::vector<PreparedMask> prepared;  ///< parallel to the input
};

/// Multi-berry removal, then metric filters, then EFD/PCA outlier rounds.
FilterOutcome run_filter_pipeline(std::span<const MaskRecord> masks, const FilterConfig& cfg,
                                  const std::optional<ReferenceSpec>& reference = std::nullopt);

}  // namespace clustermorph
