#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clustermorph {

/// Planar point. For image data x is the column and y the row, so y grows
/// downwards.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

/// Axis-aligned box in XYWH form.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const noexcept { return w <= 0 || h <= 0; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Closed simple polygon with positive signed (shoelace) area.
///
/// Construction drops consecutive duplicate vertices (including a repeated
/// closing vertex) and reverses clockwise input, so a Contour is always
/// counter-clockwise in its own x/y frame. Fewer than three distinct
/// vertices raise GeometryError.
class Contour {
 public:
  Contour() = default;
  explicit Contour(std::vector<Point> points);

  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  bool empty() const noexcept { return points_.empty(); }

  friend bool operator==(const Contour&, const Contour&) = default;

 private:
  std::vector<Point> points_;
};

/// Signed shoelace area of an arbitrary vertex ring (positive when CCW).
double signed_area(std::span<const Point> ring) noexcept;

}  // namespace clustermorph
