#include "clustermorph/geometry.hpp"

#include <algorithm>

#include "clustermorph/error.hpp"

namespace clustermorph {

double signed_area(std::span<const Point> ring) noexcept {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  const Point o = ring[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = ring[i] - o;
    const Point q = ring[(i + 1) % n] - o;
    sum += p.x * q.y - q.x * p.y;
  }
  return 0.5 * sum;
}

Contour::Contour(std::vector<Point> points) {
  points_.reserve(points.size());
  for (const Point& p : points) {
    if (points_.empty() || !(points_.back() == p)) points_.push_back(p);
  }
  while (points_.size() > 1 && points_.front() == points_.back()) points_.pop_back();
  if (points_.size() < 3) throw GeometryError("contour needs at least 3 distinct vertices");
  if (signed_area(points_) < 0.0) std::reverse(points_.begin(), points_.end());
}

}  // namespace clustermorph
