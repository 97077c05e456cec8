#pragma once

#include "clustermorph/bitgrid.hpp"
#include "clustermorph/geometry.hpp"

namespace clustermorph {

/// Size and principal-axis dimensions of a closed outline.
struct ShapeMetrics {
  double area = 0.0;
  double perimeter = 0.0;
  double length = 0.0;  ///< extent along the major principal axis
  double width = 0.0;   ///< extent along the minor principal axis
  double aspect_ratio = 1.0;
  Point centroid;
  double orientation = 0.0;  ///< major-axis angle in radians, in (-pi/2, pi/2]
};

/// Shoelace area (positive for a Contour). Throws GeometryError for fewer
/// than three vertices.
double polygon_area(const Contour& contour);
double polygon_perimeter(const Contour& contour);

/// Area centroid of the enclosed region.
Point polygon_centroid(const Contour& contour);

/// Smoothed pixel-edge outline. An edge next to a one-unit step is a run of
/// a digital line and is replaced by its midpoint, which puts the vertices
/// on the underlying curve; an edge between two longer edges keeps its
/// extent and only loses half a unit at each end.
Contour corner_cut(const Contour& contour);

/// Subdivide edges until the contour has at least `min_points` vertices.
/// The polygon itself is unchanged.
Contour densify(const Contour& contour, std::size_t min_points);

/// Measurements scaled by `scale` (length units per pixel): lengths scale
/// linearly and areas quadratically. Length and width are the polygon's
/// extents along the eigenvectors of its second area moments.
ShapeMetrics shape_metrics(const Contour& contour, double scale = 1.0);

/// 4*pi*area / perimeter^2.
double circularity(const ShapeMetrics& m);

/// |a AND b| / |a OR b|. Throws EmptyMaskError when both are empty.
double mask_iou(const BitGrid& a, const BitGrid& b);

/// Rigid transform helpers used by tests and generators.
Contour rotate(const Contour& contour, double radians, Point about = {});
Contour scale(const Contour& contour, double factor, Point about = {});
Contour translate(const Contour& contour, Point offset);
/// Same polygon starting at vertex `shift`.
Contour rotate_start(const Contour& contour, std::size_t shift);

}  // namespace clustermorph
