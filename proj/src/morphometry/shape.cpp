#include "clustermorph/shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "clustermorph/error.hpp"
#include "clustermorph/kernels.hpp"

namespace clustermorph {
namespace {

void require_polygon(const Contour& c) {
  if (c.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
}

// Raw area moments about `origin`: area, first moments and second moments.
struct Moments {
  double area = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
};

Moments moments(const Contour& c, Point origin) {
  Moments m;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = c[i] - origin;
    const Point q = c[(i + 1) % n] - origin;
    const double cross = p.x * q.y - q.x * p.y;
    m.area += cross;
    m.sx += (p.x + q.x) * cross;
    m.sy += (p.y + q.y) * cross;
    m.sxx += (p.x * p.x + p.x * q.x + q.x * q.x) * cross;
    m.syy += (p.y * p.y + p.y * q.y + q.y * q.y) * cross;
    m.sxy += (p.x * q.y + 2 * p.x * p.y + 2 * q.x * q.y + q.x * p.y) * cross;
  }
  m.area *= 0.5;
  m.sx /= 6.0;
  m.sy /= 6.0;
  m.sxx /= 12.0;
  m.syy /= 12.0;
  m.sxy /= 24.0;
  return m;
}

}  // namespace

double polygon_area(const Contour& contour) {
  require_polygon(contour);
  const Point o = contour[0];
  std::vector<double> xs(contour.size()), ys(contour.size());
  for (std::size_t i = 0; i < contour.size(); ++i) {
    xs[i] = contour[i].x - o.x;
    ys[i] = contour[i].y - o.y;
  }
  return 0.5 * kernels::shoelace(xs, ys);
}

double polygon_perimeter(const Contour& contour) {
  require_polygon(contour);
  double total = 0.0;
  const std::size_t n = contour.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = contour[(i + 1) % n] - contour[i];
    total += std::hypot(d.x, d.y);
  }
  return total;
}

Point polygon_centroid(const Contour& contour) {
  require_polygon(contour);
  const Point o = contour[0];
  const Moments m = moments(contour, o);
  if (m.area == 0.0) throw GeometryError("centroid of a zero-area polygon");
  return {o.x + m.sx / m.area, o.y + m.sy / m.area};
}

Contour corner_cut(const Contour& contour) {
  require_polygon(contour);
  const std::size_t n = contour.size();
  std::vector<double> len(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = contour[(i + 1) % n] - contour[i];
    len[i] = std::hypot(d.x, d.y);
  }
  std::vector<Point> out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = contour[i];
    const Point q = contour[(i + 1) % n];
    const bool run = len[(i + n - 1) % n] <= 1.0 + 1e-9 || len[(i + 1) % n] <= 1.0 + 1e-9;
    if (run || len[i] <= 1.0) {
      out.push_back(0.5 * (p + q));
    } else {
      const double t = 0.5 / len[i];
      out.push_back(p + t * (q - p));
      out.push_back(q - t * (q - p));
    }
  }
  return Contour(std::move(out));
}

Contour densify(const Contour& contour, std::size_t min_points) {
  require_polygon(contour);
  if (contour.size() >= min_points) return contour;
  const double perimeter = polygon_perimeter(contour);
  // Target spacing; every edge gets ceil(len / spacing) pieces.
  double spacing = perimeter / static_cast<double>(min_points);
  std::vector<Point> out;
  for (int attempt = 0; attempt < 8; ++attempt) {
    out.clear();
    const std::size_t n = contour.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = contour[i];
      const Point q = contour[(i + 1) % n];
      const double len = std::hypot(q.x - p.x, q.y - p.y);
      const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
      for (int k = 0; k < pieces; ++k) {
        const double t = static_cast<double>(k) / pieces;
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    if (out.size() >= min_points) break;
    spacing *= 0.5;
  }
  return Contour(std::move(out));
}

ShapeMetrics shape_metrics(const Contour& contour, double scale) {
  require_polygon(contour);
  if (!(scale > 0.0)) throw GeometryError("scale must be positive");
  const Point o = contour[0];
  const Moments m = moments(contour, o);
  if (!(std::abs(m.area) > 0.0)) throw GeometryError("degenerate polygon (zero area)");
  const double cx = m.sx / m.area;
  const double cy = m.sy / m.area;
  const double mxx = m.sxx / m.area - cx * cx;
  const double myy = m.syy / m.area - cy * cy;
  const double mxy = m.sxy / m.area - cx * cy;
  const double theta = 0.5 * std::atan2(2.0 * mxy, mxx - myy);
  const double ux = std::cos(theta), uy = std::sin(theta);
  double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
  for (const Point& p : contour.points()) {
    const double px = p.x - o.x - cx, py = p.y - o.y - cy;
    const double u = px * ux + py * uy;
    const double v = -px * uy + py * ux;
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  ShapeMetrics out;
  out.area = m.area * scale * scale;
  out.perimeter = polygon_perimeter(contour) * scale;
  double length = umax - umin;
  double width = vmax - vmin;
  double orientation = theta;
  if (width > length) {
    std::swap(length, width);
    orientation = theta + (theta > 0 ? -std::numbers::pi / 2 : std::numbers::pi / 2);
  }
  out.length = length * scale;
  out.width = width * scale;
  out.aspect_ratio = width > 0.0 ? length / width : INFINITY;
  out.centroid = {(o.x + cx) * scale, (o.y + cy) * scale};
  out.orientation = orientation;
  return out;
}

double circularity(const ShapeMetrics& m) {
  if (!(m.perimeter > 0.0)) return 0.0;
  return 4.0 * std::numbers::pi * m.area / (m.perimeter * m.perimeter);
}

double mask_iou(const BitGrid& a, const BitGrid& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("IoU of masks with different dimensions");
  }
  const std::size_t na = a.count();
  const std::size_t nb = b.count();
  if (na == 0 && nb == 0) throw EmptyMaskError("IoU of two empty masks");
  const std::size_t inter = intersection_count(a, b);
  return static_cast<double>(inter) / static_cast<double>(na + nb - inter);
}

Contour rotate(const Contour& contour, double radians, Point about) {
  const double c = std::cos(radians), s = std::sin(radians);
  std::vector<Point> out;
  out.reserve(contour.size());
  for (const Point& p : contour.points()) {
    const Point d = p - about;
    out.push_back({about.x + c * d.x - s * d.y, about.y + s * d.x + c * d.y});
  }
  return Contour(std::move(out));
}

Contour scale(const Contour& contour, double factor, Point about) {
  std::vector<Point> out;
  out.reserve(contour.size());
  for (const Point& p : contour.points()) out.push_back(about + factor * (p - about));
  return Contour(std::move(out));
}

Contour translate(const Contour& contour, Point offset) {
  std::vector<Point> out;
  out.reserve(contour.size());
  for (const Point& p : contour.points()) out.push_back(p + offset);
  return Contour(std::move(out));
}

Contour rotate_start(const Contour& contour, std::size_t shift) {
  std::vector<Point> out(contour.points().begin(), contour.points().end());
  if (!out.empty()) {
    std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift % out.size()),
                out.end());
  }
  return Contour(std::move(out));
}

}  // namespace clustermorph
