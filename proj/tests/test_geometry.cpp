#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clustermorph/contour.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/geometry.hpp"
#include "clustermorph/shape.hpp"
#include "clustermorph/synth.hpp"

using namespace clustermorph;

namespace {

constexpr double kPi = std::numbers::pi;

// Heron's formula per fan triangle: no cross products involved.
double fan_area(const Contour& c) {
  double total = 0;
  const Point o = c[0];
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    const double a = std::hypot(c[i].x - o.x, c[i].y - o.y);
    const double b = std::hypot(c[i + 1].x - c[i].x, c[i + 1].y - c[i].y);
    const double e = std::hypot(o.x - c[i + 1].x, o.y - c[i + 1].y);
    const double s = (a + b + e) / 2;
    total += std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - e)));
  }
  return total;
}

Contour random_convex(Rng& rng, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (auto& v : t) v = rng.uniform(0, 2 * kPi);
  std::sort(t.begin(), t.end());
  const double ax = rng.uniform(5, 50), by = rng.uniform(5, 50);
  const Point c{rng.uniform(-100, 100), rng.uniform(-100, 100)};
  std::vector<Point> pts;
  for (double v : t) pts.push_back({c.x + ax * std::cos(v), c.y + by * std::sin(v)});
  return Contour(pts);
}

Contour rect(double w, double h) { return Contour({{0, 0}, {w, 0}, {w, h}, {0, h}}); }

Contour raster_ellipse(double a, double b, double angle) {
  BitGrid g(140, 140);
  fill_ellipse(g, {70.3, 69.8}, a, b, angle);
  return corner_cut(extract_contour(g));
}

}  // namespace

TEST(Contour, ConstructionNormalisesOrientationAndDuplicates) {
  const Contour cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
  EXPECT_EQ(cw.size(), 4u);
  EXPECT_GT(signed_area(cw.points()), 0);
  EXPECT_THROW(Contour({{0, 0}, {1, 1}, {1, 1}}), GeometryError);
}

TEST(PolygonArea, SimpleCases) {
  EXPECT_DOUBLE_EQ(polygon_area(rect(1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(polygon_area(Contour({{0, 0}, {2, 0}, {0, 2}})), 2.0);
}

TEST(PolygonArea, MatchesTriangulationOracle) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Contour c = random_convex(rng, static_cast<int>(rng.uniform_int(3, 60)));
    const double oracle = fan_area(c);
    EXPECT_NEAR(polygon_area(c), oracle, 1e-9 * std::max(1.0, oracle));
  }
}

TEST(ShapeMetrics, Rectangle) {
  const ShapeMetrics m = shape_metrics(rect(4, 2));
  EXPECT_NEAR(m.length, 4, 1e-12);
  EXPECT_NEAR(m.width, 2, 1e-12);
  EXPECT_NEAR(m.aspect_ratio, 2, 1e-12);
  EXPECT_NEAR(m.perimeter, 12, 1e-12);
  EXPECT_NEAR(m.centroid.x, 2, 1e-12);
  EXPECT_NEAR(m.centroid.y, 1, 1e-12);
}

TEST(ShapeMetrics, ScaleIsLinearInLengthQuadraticInArea) {
  const ShapeMetrics m = shape_metrics(rect(4, 2), 0.5);
  EXPECT_NEAR(m.length, 2, 1e-12);
  EXPECT_NEAR(m.area, 2, 1e-12);
  EXPECT_NEAR(m.perimeter, 6, 1e-12);
}

TEST(ShapeMetrics, AnalyticRotationInvariance) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Contour c = random_convex(rng, 40);
    const ShapeMetrics a = shape_metrics(c);
    const ShapeMetrics b = shape_metrics(rotate(c, rng.uniform(0, 2 * kPi), {3, 4}));
    EXPECT_NEAR(a.area, b.area, 1e-6 * a.area);
    EXPECT_NEAR(a.perimeter, b.perimeter, 1e-6 * a.perimeter);
    EXPECT_NEAR(a.length, b.length, 1e-6 * a.length);
    EXPECT_NEAR(a.width, b.width, 1e-6 * a.width);
  }
  const ShapeMetrics r0 = shape_metrics(rect(4, 2));
  const ShapeMetrics r30 = shape_metrics(rotate(rect(4, 2), kPi / 6));
  EXPECT_NEAR(r30.length, r0.length, 1e-6);
  EXPECT_NEAR(r30.width, r0.width, 1e-6);
  EXPECT_NEAR(r30.aspect_ratio, 2.0, 1e-6);
}

TEST(ShapeMetrics, RasterisedEllipse) {
  const ShapeMetrics m = shape_metrics(raster_ellipse(40, 20, 0));
  EXPECT_NEAR(m.length, 80, 0.03 * 80);
  EXPECT_NEAR(m.width, 40, 0.03 * 40);
  for (double deg : {15.0, 30.0, 47.0, 60.0, 90.0, 133.0}) {
    const ShapeMetrics r = shape_metrics(raster_ellipse(40, 20, deg * kPi / 180));
    EXPECT_NEAR(r.length, m.length, 0.03 * m.length) << deg;
    EXPECT_NEAR(r.width, m.width, 0.03 * m.width) << deg;
    EXPECT_NEAR(r.area, m.area, 0.03 * m.area) << deg;
    EXPECT_NEAR(r.perimeter, m.perimeter, 0.03 * m.perimeter) << deg;
  }
}

TEST(ShapeMetrics, IsoperimetricOnRandomOutlines) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    BitGrid g(60, 60);
    fill_ellipse(g, {30, 30}, rng.uniform(3, 25), rng.uniform(2, 20), rng.uniform(0, kPi));
    if (rng.uniform() < 0.5) fill_ellipse(g, {rng.uniform(20, 40), rng.uniform(20, 40)}, 8, 4, rng.uniform(0, kPi));
    for (const Contour& c : {extract_contour(g), corner_cut(extract_contour(g))}) {
      const ShapeMetrics m = shape_metrics(c);
      EXPECT_GE(m.perimeter * m.perimeter, 4 * kPi * m.area);
      EXPECT_GE(m.aspect_ratio, 1.0);
      EXPECT_GT(m.area, 0.0);
    }
  }
}

TEST(ShapeMetrics, CircleNearIsoperimetricEquality) {
  std::vector<Point> pts;
  for (int i = 0; i < 720; ++i) pts.push_back({25 * std::cos(i * kPi / 360), 25 * std::sin(i * kPi / 360)});
  const ShapeMetrics m = shape_metrics(Contour(pts));
  EXPECT_NEAR(circularity(m), 1.0, 0.02);
}

TEST(CornerCut, DiskPerimeterNearAnalytic) {
  for (double r : {14.0, 30.0, 60.0}) {
    BitGrid g(140, 140);
    fill_ellipse(g, {70.2, 69.7}, r, r, 0);
    const Contour raw = extract_contour(g);
    const ShapeMetrics m = shape_metrics(corner_cut(raw));
    EXPECT_NEAR(m.perimeter, 2 * kPi * r, 0.02 * 2 * kPi * r) << r;
    EXPECT_NEAR(m.area, kPi * r * r, 0.02 * kPi * r * r) << r;
    EXPECT_GT(circularity(m), 0.97) << r;
  }
}

TEST(CornerCut, StraightSidesSurvive) {
  const Contour sq = corner_cut(rect(10, 10));
  EXPECT_EQ(sq.size(), 8u);
  EXPECT_NEAR(polygon_area(sq), 99.5, 1e-12);
  // a unit staircase becomes its diagonal x + y = 4.5
  const Contour stair = corner_cut(Contour({{0, 0}, {4, 0}, {4, 1}, {3, 1}, {3, 2}, {2, 2}, {2, 3}, {1, 3}, {1, 4}, {0, 4}}));
  const auto on_line = std::count_if(stair.points().begin(), stair.points().end(),
                                     [](Point p) { return std::abs(p.x + p.y - 4.5) < 1e-12; });
  EXPECT_EQ(on_line, 8);
}

TEST(Densify, KeepsPolygon) {
  const Contour c = rect(4, 2);
  const Contour d = densify(c, 50);
  EXPECT_GE(d.size(), 50u);
  EXPECT_NEAR(polygon_area(d), 8, 1e-12);
  EXPECT_NEAR(polygon_perimeter(d), 12, 1e-12);
}

TEST(Transforms, RotateStartKeepsPolygon) {
  Rng rng(6);
  const Contour c = random_convex(rng, 20);
  const Contour s = rotate_start(c, 7);
  EXPECT_EQ(s[0], c[7]);
  EXPECT_NEAR(polygon_area(s), polygon_area(c), 1e-9);
  EXPECT_NEAR(polygon_area(scale(c, 3)), 9 * polygon_area(c), 1e-6);
  const Point p0 = translate(c, {1, 2})[0];
  EXPECT_DOUBLE_EQ(p0.x, c[0].x + 1);
}

TEST(MaskIou, HandCounts) {
  BitGrid a(4, 4), b(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      a.set(r, c);
      b.set(r, c + 1);
    }
  EXPECT_DOUBLE_EQ(mask_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(mask_iou(b, a), mask_iou(a, b));
  BitGrid d(4, 4);
  d.set(3, 3);
  EXPECT_DOUBLE_EQ(mask_iou(a, d), 0.0);
  EXPECT_THROW(mask_iou(BitGrid(4, 4), BitGrid(4, 4)), EmptyMaskError);
}

TEST(Geometry, DegenerateThrows) {
  EXPECT_THROW(shape_metrics(Contour({{0, 0}, {1, 1}, {2, 2}})), GeometryError);
}
