#pragma once

#include <array>
#include <span>
#include <vector>

#include "clustermorph/geometry.hpp"

namespace clustermorph {

struct HullPolygon {
  Contour polygon;
  double concavity = 1.0;
};

/// Andrew's monotone chain; collinear boundary points are dropped.
/// Throws GeometryError when the points do not span an area.
Contour convex_hull(std::span<const Point> points);

/// Concave hull by erosion of the Delaunay triangulation. Boundary
/// triangles are removed longest edge first while that edge is longer than
/// min_edge + c * (max_edge - min_edge), as long as the removal keeps the
/// polygon simple and every point on or inside it. c = 1 gives the convex
/// hull; smaller c gives tighter hulls. Throws GeometryError for fewer than
/// three distinct points, collinear input or c outside (0, 1].
HullPolygon concave_hull(std::span<const Point> points, double concavity);

/// Point in closed polygon test with an absolute tolerance on the boundary.
bool contains(const Contour& polygon, Point p, double tolerance = 1e-9);

/// Delaunay triangles as index triples into `points` (duplicates resolved to
/// their first occurrence), counter-clockwise.
std::vector<std::array<std::size_t, 3>> delaunay(std::span<const Point> points);

}  // namespace clustermorph
