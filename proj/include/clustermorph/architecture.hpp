#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clustermorph/ecdf.hpp"
#include "clustermorph/hull.hpp"
#include "clustermorph/pca.hpp"

namespace clustermorph {

/// Sum of berry areas over hull area, both in the same units.
/// Throws GeometryError for a zero-area hull.
double compactness(std::span<const double> berry_areas, const HullPolygon& hull);

struct HullMetrics {
  double length = 0.0;
  double width = 0.0;
  double perimeter = 0.0;
  double aspect = 1.0;
  double area = 0.0;
};

/// Principal-axis extents, perimeter and area multiplied by `scale`
/// (areas by scale squared).
HullMetrics hull_metrics(const HullPolygon& hull, double scale = 1.0);

struct HullShapeModel {
  PcaModel model;
  Eigen::MatrixXd scores;         ///< one row per entry of `used`
  std::vector<std::size_t> used;  ///< indices of hulls that entered the fit
  std::vector<std::string> warnings;
};

/// Normalised EFD of every hull, then PCA across hulls. Degenerate hulls are
/// left out with a warning. Throws GeometryError when fewer than three
/// remain.
HullShapeModel hull_shape_pca(std::span<const HullPolygon> hulls, int harmonics = 20);

struct ArchitectureConfig {
  double concavity = 0.5;
};

/// Descriptors of one cluster view.
struct ClusterArchitecture {
  int berry_count = 0;
  std::optional<double> corrected_count;
  EcdfProfile ecdf_x;
  EcdfProfile ecdf_y;
  EcdfDescriptors ecdf_x_desc;
  EcdfDescriptors ecdf_y_desc;
  HullPolygon hull;  ///< pixel coordinates
  double compactness = 0.0;
  HullMetrics metrics;  ///< mm
  std::vector<double> shape_pc_scores;
};

/// Berry outlines are in pixels; `berry_areas_px` are the mask pixel counts.
/// The hull spans every outline vertex and ECDFs use the outline centroids.
ClusterArchitecture analyze_cluster(std::span<const Contour> berries,
                                    std::span<const double> berry_areas_px, double mm_per_px,
                                    const ArchitectureConfig& cfg = {});

struct AngleView {
  int angle = 0;  ///< degrees
  double count = 0.0;
  double max_berry_area = 0.0;
};

struct AngleSeries {
  std::string cluster_id;
  std::vector<AngleView> views;
};

struct AngleVariation {
  std::vector<int> angles;  ///< ascending
  std::vector<double> count_ratio;
  std::vector<double> area_ratio;
};

/// Counts and maximum berry areas relative to the 0 degree view.
/// Throws GeometryError for fewer than two views, duplicate angles or a
/// missing 0 degree view.
AngleVariation angle_variation(const AngleSeries& series);

/// View with the most berries; ties go to the lowest angle.
AngleView select_max_angle(const AngleSeries& series);

}  // namespace clustermorph
