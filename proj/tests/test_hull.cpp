#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "clustermorph/contour.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/hull.hpp"
#include "clustermorph/shape.hpp"
#include "clustermorph/synth.hpp"

using namespace clustermorph;

namespace {

constexpr double kPi = std::numbers::pi;

// Gift wrapping: independent of the monotone chain under test.
std::vector<Point> jarvis(const std::vector<Point>& pts) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y)) start = i;
  std::vector<Point> hull;
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    std::size_t next = (cur + 1) % pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point a = pts[next] - pts[cur], b = pts[i] - pts[cur];
      const double cross = a.x * b.y - a.y * b.x;
      const double da = a.x * a.x + a.y * a.y, db = b.x * b.x + b.y * b.y;
      if (cross < 0 || (cross == 0 && db > da)) next = i;
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());
  return hull;
}

bool same_vertex_set(const Contour& c, const std::vector<Point>& v) {
  auto key = [](Point p) { return std::pair{p.x, p.y}; };
  std::set<std::pair<double, double>> a, b;
  for (const Point& p : c.points()) a.insert(key(p));
  for (const Point& p : v) b.insert(key(p));
  return a == b;
}

std::vector<Point> random_cloud(Rng& rng, int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({std::round(rng.uniform(0, 300)), std::round(rng.uniform(0, 500))});
  return pts;
}

std::vector<Point> l_shape() {
  std::vector<Point> pts;
  for (int x = 0; x <= 30; x += 2)
    for (int y = 0; y <= 30; y += 2)
      if (x <= 8 || y <= 8) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  return pts;
}

// Outline vertices of a synthetic cluster.
std::vector<Point> cluster_vertices(std::uint64_t seed, Layout layout) {
  SceneSpec spec;
  spec.seed = seed;
  spec.layout = layout;
  spec.decoys = {0, 0, 0, 0, 0};
  const SynthScene s = gen_scene_2d(spec);
  std::vector<Point> pts;
  for (const auto& m : s.file.masks) {
    const Contour c = corner_cut(extract_contour(decode_rle(m.rle)));
    pts.insert(pts.end(), c.points().begin(), c.points().end());
  }
  return pts;
}

}  // namespace

TEST(ConvexHull, MatchesGiftWrapping) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto pts = random_cloud(rng, static_cast<int>(rng.uniform_int(3, 200)));
    // keep to clouds in general position so collinear elision doesn't matter
    const Contour h = convex_hull(pts);
    auto oracle = jarvis(pts);
    std::vector<Point> strict;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      const Point a = oracle[(k + oracle.size() - 1) % oracle.size()], b = oracle[k], c = oracle[(k + 1) % oracle.size()];
      if ((b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) != 0) strict.push_back(b);
    }
    EXPECT_TRUE(same_vertex_set(h, strict)) << i;
  }
}

TEST(ConcaveHull, TriangleForAnyConcavity) {
  const std::vector<Point> tri = {{0, 0}, {10, 0}, {3, 8}};
  for (double c : {1.0, 0.5, 0.1}) {
    const HullPolygon h = concave_hull(tri, c);
    EXPECT_EQ(h.polygon.size(), 3u);
    EXPECT_NEAR(polygon_area(h.polygon), 40, 1e-12);
  }
}

TEST(ConcaveHull, GridAtOneIsBoundingSquare) {
  std::vector<Point> pts;
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  const HullPolygon h = concave_hull(pts, 1.0);
  EXPECT_NEAR(polygon_area(h.polygon), 81, 1e-12);
  EXPECT_EQ(h.polygon.size(), 4u);
}

TEST(ConcaveHull, LShapeTightensBelowOne) {
  const auto pts = l_shape();
  EXPECT_LT(polygon_area(concave_hull(pts, 0.3).polygon), polygon_area(concave_hull(pts, 1.0).polygon));
}

TEST(ConcaveHull, OneEqualsConvexHull) {
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    const auto pts = random_cloud(rng, 150);
    const Contour hull = convex_hull(pts);
    const HullPolygon c1 = concave_hull(pts, 1.0);
    EXPECT_TRUE(same_vertex_set(c1.polygon, std::vector<Point>(hull.points().begin(), hull.points().end())));
  }
  const auto pts = cluster_vertices(4, Layout::winged);
  EXPECT_NEAR(polygon_area(concave_hull(pts, 1.0).polygon), polygon_area(convex_hull(pts)), 1e-6);
}

TEST(ConcaveHull, SweepIsMonotoneAndContainsEveryPoint) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto pts = cluster_vertices(seed, static_cast<Layout>(seed % 4));
    const double convex = polygon_area(convex_hull(pts));
    double prev = 0;
    for (int k = 1; k <= 10; ++k) {
      const double c = k / 10.0;
      const HullPolygon h = concave_hull(pts, c);
      const double area = polygon_area(h.polygon);
      EXPECT_GE(area, prev - 1e-9) << "c=" << c;
      EXPECT_LE(area, convex + 1e-9);
      prev = area;
      for (const Point& p : pts) ASSERT_TRUE(contains(h.polygon, p, 1e-7)) << "c=" << c;
    }
  }
}

TEST(ConcaveHull, ResultIsSimple) {
  const auto pts = cluster_vertices(11, Layout::winged);
  const Contour& poly = concave_hull(pts, 0.2).polygon;
  const std::size_t n = poly.size();
  auto cross = [](Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Point a = poly[i], b = poly[(i + 1) % n], c = poly[j], d = poly[(j + 1) % n];
      const bool hit = cross(a, b, c) * cross(a, b, d) < 0 && cross(c, d, a) * cross(c, d, b) < 0;
      ASSERT_FALSE(hit) << i << " " << j;
    }
}

TEST(ConcaveHull, Errors) {
  const std::vector<Point> two = {{0, 0}, {1, 1}};
  EXPECT_THROW(concave_hull(two, 0.5), GeometryError);
  const std::vector<Point> line = {{0, 0}, {1, 1}, {2, 2}, {5, 5}};
  EXPECT_THROW(concave_hull(line, 0.5), GeometryError);
  const std::vector<Point> tri = {{0, 0}, {10, 0}, {3, 8}};
  EXPECT_THROW(concave_hull(tri, 0.0), GeometryError);
  EXPECT_THROW(concave_hull(tri, 1.5), GeometryError);
}

TEST(Delaunay, EmptyCircumcircles) {
  Rng rng(3);
  const auto pts = random_cloud(rng, 80);
  const auto tris = delaunay(pts);
  double area = 0;
  for (const auto& t : tris) {
    const Point a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
    const double orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    EXPECT_GT(orient, 0);
    area += orient / 2;
    for (const Point& p : pts) {
      // in-circle determinant; strictly inside means positive for CCW triangles
      const double ax = a.x - p.x, ay = a.y - p.y, bx = b.x - p.x, by = b.y - p.y, cx = c.x - p.x, cy = c.y - p.y;
      const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                         (cx * cx + cy * cy) * (ax * by - bx * ay);
      EXPECT_LE(det, 1e-6 * (1 + std::abs(det))) ;
    }
  }
  EXPECT_NEAR(area, polygon_area(convex_hull(pts)), 1e-6);
}

TEST(Contains, BoundaryAndOutside) {
  const Contour sq({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
  EXPECT_TRUE(contains(sq, {2, 2}));
  EXPECT_TRUE(contains(sq, {4, 2}));
  EXPECT_TRUE(contains(sq, {0, 0}));
  EXPECT_FALSE(contains(sq, {4.1, 2}));
  EXPECT_FALSE(contains(rotate(sq, kPi / 4), {3.9, 3.9}));
}
