#include "clustermorph/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <tuple>

#include <boost/polygon/voronoi.hpp>

#include "clustermorph/error.hpp"

namespace clustermorph {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Indices of distinct points, first occurrence wins, plus the integer
// lattice they are snapped to for the Voronoi builder.
struct Lattice {
  std::vector<std::size_t> rep;
  std::vector<boost::polygon::point_data<std::int32_t>> sites;
};

Lattice snap(std::span<const Point> points) {
  double minx = points[0].x, maxx = points[0].x, miny = points[0].y, maxy = points[0].y;
  for (const Point& p : points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double extent = std::max({maxx - minx, maxy - miny, 1e-300});
  // Power-of-two scale keeps integer pixel coordinates exact.
  const double s = std::ldexp(1.0, static_cast<int>(std::floor(std::log2((1 << 26) / extent))));
  Lattice out;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto qx = static_cast<std::int64_t>(std::llround((points[i].x - minx) * s));
    const auto qy = static_cast<std::int64_t>(std::llround((points[i].y - miny) * s));
    if (seen.emplace(std::pair{qx, qy}, i).second) {
      out.rep.push_back(i);
      out.sites.emplace_back(static_cast<std::int32_t>(qx), static_cast<std::int32_t>(qy));
    }
  }
  return out;
}

}  // namespace

Contour convex_hull(std::span<const Point> points) {
  std::vector<Point> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) throw GeometryError("convex hull needs three distinct points");
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) throw GeometryError("points are collinear");
  return Contour(std::move(h));
}

std::vector<std::array<std::size_t, 3>> delaunay(std::span<const Point> points) {
  if (points.size() < 3) throw GeometryError("triangulation needs three points");
  const Lattice lat = snap(points);
  boost::polygon::voronoi_diagram<double> vd;
  boost::polygon::construct_voronoi(lat.sites.begin(), lat.sites.end(), &vd);

  std::vector<std::array<std::size_t, 3>> tris;
  std::vector<std::size_t> ring;
  for (const auto& v : vd.vertices()) {
    ring.clear();
    const auto* e = v.incident_edge();
    do {
      ring.push_back(lat.rep[e->cell()->source_index()]);
      e = e->rot_next();
    } while (e != v.incident_edge());
    // Four or more cocircular sites share a vertex; fan them.
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      std::array<std::size_t, 3> t{ring[0], ring[k], ring[k + 1]};
      const double a = cross(points[t[0]], points[t[1]], points[t[2]]);
      if (a == 0.0) continue;
      if (a < 0) std::swap(t[1], t[2]);
      tris.push_back(t);
    }
  }
  return tris;
}

HullPolygon concave_hull(std::span<const Point> points, double concavity) {
  if (!(concavity > 0.0 && concavity <= 1.0)) throw GeometryError("concavity must be in (0, 1]");
  convex_hull(points);  // rejects degenerate input
  auto tris = delaunay(points);
  std::sort(tris.begin(), tris.end());
  const std::size_t nt = tris.size();

  // Neighbour across edge k = (v[k], v[k+1]).
  std::vector<std::array<long, 3>> nb(nt, {-1, -1, -1});
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, int>> open;
  double min_edge = std::numeric_limits<double>::infinity();
  double max_edge = 0.0;
  for (std::size_t t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = tris[t][k];
      const std::size_t b = tris[t][(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::pair{t, k});
        const double len = dist(points[a], points[b]);
        min_edge = std::min(min_edge, len);
        max_edge = std::max(max_edge, len);
      } else {
        nb[t][k] = static_cast<long>(it->second.first);
        nb[it->second.first][it->second.second] = static_cast<long>(t);
        open.erase(it);
      }
    }
  const double threshold = min_edge + concavity * (max_edge - min_edge);

  std::vector<char> alive(nt, 1);
  std::vector<int> border_edges(points.size(), 0);
  auto is_border = [&](std::size_t t, int k) { return nb[t][k] < 0 || !alive[nb[t][k]]; };
  auto edge_len = [&](std::size_t t, int k) {
    return dist(points[tris[t][k]], points[tris[t][(k + 1) % 3]]);
  };

  // Longest edge first; ties resolved by triangle then edge index.
  using Item = std::tuple<double, long, int>;
  std::priority_queue<Item> queue;
  auto push = [&](std::size_t t, int k) {
    const double len = edge_len(t, k);
    if (len > threshold) queue.emplace(len, -static_cast<long>(t), -k);
  };
  for (std::size_t t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k)
      if (is_border(t, k)) {
        ++border_edges[tris[t][k]];
        ++border_edges[tris[t][(k + 1) % 3]];
        push(t, k);
      }

  while (!queue.empty()) {
    const auto [len, nt_neg, nk] = queue.top();
    queue.pop();
    const auto t = static_cast<std::size_t>(-nt_neg);
    const int k = -nk;
    if (!alive[t]) continue;
    int borders = 0;
    for (int j = 0; j < 3; ++j) borders += is_border(t, j);
    const std::size_t apex = tris[t][(k + 2) % 3];
    if (borders != 1 || border_edges[apex] > 0) continue;
    alive[t] = 0;
    --border_edges[tris[t][k]];
    --border_edges[tris[t][(k + 1) % 3]];
    for (int j = 1; j <= 2; ++j) {
      const int e = (k + j) % 3;
      ++border_edges[tris[t][e]];
      ++border_edges[tris[t][(e + 1) % 3]];
      const long other = nb[t][e];
      if (other < 0) continue;
      const auto o = static_cast<std::size_t>(other);
      for (int m = 0; m < 3; ++m)
        if (nb[o][m] == static_cast<long>(t)) push(o, m);
    }
  }

  std::map<std::size_t, std::size_t> next;
  for (std::size_t t = 0; t < nt; ++t) {
    if (!alive[t]) continue;
    for (int k = 0; k < 3; ++k)
      if (is_border(t, k)) {
        if (!next.emplace(tris[t][k], tris[t][(k + 1) % 3]).second)
          throw GeometryError("concave hull boundary is not simple");
      }
  }
  const std::size_t start = next.begin()->first;
  std::vector<std::size_t> ring{start};
  for (std::size_t v = next.at(start); v != start; v = next.at(v)) {
    ring.push_back(v);
    if (ring.size() > next.size()) throw GeometryError("concave hull boundary is not closed");
  }
  if (ring.size() != next.size()) throw GeometryError("concave hull boundary is not connected");

  std::vector<Point> poly;
  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point a = points[ring[(i + m - 1) % m]];
    const Point b = points[ring[i]];
    const Point c = points[ring[(i + 1) % m]];
    const double scale = dist(a, b) * dist(b, c);
    if (std::abs(cross(a, b, c)) > 1e-12 * scale) poly.push_back(b);
  }
  return {Contour(std::move(poly)), concavity};
}

bool contains(const Contour& polygon, Point p, double tolerance) {
  const auto pts = polygon.points();
  const std::size_t n = pts.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = pts[j];
    const Point b = pts[i];
    const Point ab = b - a;
    const double l2 = ab.x * ab.x + ab.y * ab.y;
    double u = l2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / l2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    if (dist(p, a + u * ab) <= tolerance) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace clustermorph
