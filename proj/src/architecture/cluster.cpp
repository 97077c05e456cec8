#include <numeric>

#include "clustermorph/architecture.hpp"
#include "clustermorph/efd.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/shape.hpp"

namespace clustermorph {

double compactness(std::span<const double> berry_areas, const HullPolygon& hull) {
  const double area = polygon_area(hull.polygon);
  if (!(area > 0.0)) throw GeometryError("hull has zero area");
  return std::accumulate(berry_areas.begin(), berry_areas.end(), 0.0) / area;
}

HullMetrics hull_metrics(const HullPolygon& hull, double scale) {
  const ShapeMetrics m = shape_metrics(hull.polygon, scale);
  return {m.length, m.width, m.perimeter, m.aspect_ratio, m.area};
}

HullShapeModel hull_shape_pca(std::span<const HullPolygon> hulls, int harmonics) {
  HullShapeModel out;
  std::vector<std::vector<double>> features;
  for (std::size_t i = 0; i < hulls.size(); ++i) {
    try {
      const Contour dense = densify(hulls[i].polygon, static_cast<std::size_t>(2 * harmonics + 2));
      features.push_back(efd_features(efd_normalize(efd_fit(dense, harmonics))));
      out.used.push_back(i);
    } catch (const GeometryError& e) {
      out.warnings.push_back("hull " + std::to_string(i) + " left out: " + e.what());
    }
  }
  if (features.size() < 3) throw GeometryError("hull shape PCA needs at least three hulls");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(features.size()),
                       static_cast<Eigen::Index>(features[0].size()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      rows(r, c) = features[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  out.model = pca_fit(rows);
  out.scores = pca_scores(out.model, rows);
  return out;
}

ClusterArchitecture analyze_cluster(std::span<const Contour> berries,
                                    std::span<const double> berry_areas_px, double mm_per_px,
                                    const ArchitectureConfig& cfg) {
  if (berries.empty()) throw GeometryError("cluster has no berries");
  if (berries.size() != berry_areas_px.size())
    throw DimensionError("berry outlines and areas differ in length");
  ClusterArchitecture out;
  out.berry_count = static_cast<int>(berries.size());

  std::vector<Point> centroids;
  std::vector<Point> vertices;
  for (const Contour& c : berries) {
    centroids.push_back(polygon_centroid(c));
    vertices.insert(vertices.end(), c.points().begin(), c.points().end());
  }
  out.ecdf_x = ecdf_profile(centroids, Axis::x);
  out.ecdf_y = ecdf_profile(centroids, Axis::y);
  out.ecdf_x_desc = ecdf_descriptors(out.ecdf_x);
  out.ecdf_y_desc = ecdf_descriptors(out.ecdf_y);
  out.hull = concave_hull(vertices, cfg.concavity);
  out.compactness = compactness(berry_areas_px, out.hull);
  out.metrics = hull_metrics(out.hull, mm_per_px);
  return out;
}

}  // namespace clustermorph
