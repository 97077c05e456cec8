#include "clustermorph/efd.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "clustermorph/error.hpp"

namespace clustermorph {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cumulative arc length at each vertex; cum[n] is the perimeter.
std::vector<double> arc_lengths(const Contour& c) {
  const std::size_t n = c.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = c[(i + 1) % n] - c[i];
    cum[i + 1] = cum[i] + std::hypot(d.x, d.y);
  }
  return cum;
}

Point point_at(const Contour& c, const std::vector<double>& cum, double s, std::size_t& seg) {
  const std::size_t n = c.size();
  while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
  const double len = cum[seg + 1] - cum[seg];
  const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
  const Point p = c[seg];
  const Point q = c[(seg + 1) % n];
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

Point evaluate(const EfdCoeffs& e, double s) {  // s in [0, 1)
  double x = e.a0, y = e.c0;
  for (std::size_t h = 0; h < e.harmonics.size(); ++h) {
    const double phase = kTwoPi * static_cast<double>(h + 1) * s;
    const double cs = std::cos(phase), sn = std::sin(phase);
    const Harmonic& k = e.harmonics[h];
    x += k.a * cs + k.b * sn;
    y += k.c * cs + k.d * sn;
  }
  return {x, y};
}

}  // namespace

EfdCoeffs efd_fit(const Contour& contour, int harmonic_count) {
  if (harmonic_count < 1) throw GeometryError("harmonic count must be at least 1");
  const std::size_t n = contour.size();
  if (n < static_cast<std::size_t>(2 * harmonic_count + 2)) {
    throw GeometryError("EFD with " + std::to_string(harmonic_count) + " harmonics needs " +
                        std::to_string(2 * harmonic_count + 2) + " points, got " +
                        std::to_string(n));
  }
  const std::vector<double> cum = arc_lengths(contour);
  const double perimeter = cum[n];
  if (!(perimeter > 0.0)) throw GeometryError("zero-length contour");

  EfdCoeffs out;
  out.harmonics.resize(static_cast<std::size_t>(harmonic_count));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = contour[i];
    const Point q = contour[(i + 1) % n];
    const double dt = cum[i + 1] - cum[i];
    mx += 0.5 * (p.x + q.x) * dt;
    my += 0.5 * (p.y + q.y) * dt;
  }
  out.a0 = mx / perimeter;
  out.c0 = my / perimeter;

  for (int h = 1; h <= harmonic_count; ++h) {
    const double w = kTwoPi * h / perimeter;
    double sa = 0, sb = 0, sc = 0, sd = 0;
    double prev_cos = 1.0, prev_sin = 0.0;  // phase at cum[0] = 0
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = contour[i];
      const Point q = contour[(i + 1) % n];
      const double dt = cum[i + 1] - cum[i];
      const double phase = w * cum[i + 1];
      const double cs = std::cos(phase), sn = std::sin(phase);
      if (dt > 0.0) {
        const double rx = (q.x - p.x) / dt;
        const double ry = (q.y - p.y) / dt;
        sa += rx * (cs - prev_cos);
        sb += rx * (sn - prev_sin);
        sc += ry * (cs - prev_cos);
        sd += ry * (sn - prev_sin);
      }
      prev_cos = cs;
      prev_sin = sn;
    }
    const double k = perimeter / (2.0 * h * h * std::numbers::pi * std::numbers::pi);
    out.harmonics[static_cast<std::size_t>(h - 1)] = {k * sa, k * sb, k * sc, k * sd};
  }
  return out;
}

EfdCoeffs efd_normalize(const EfdCoeffs& coeffs) {
  if (coeffs.harmonics.empty()) throw GeometryError("no harmonics to normalise");
  const Harmonic& f = coeffs.harmonics[0];
  const double energy = f.a * f.a + f.b * f.b + f.c * f.c + f.d * f.d;
  if (!(energy > 0.0)) throw GeometryError("degenerate first harmonic");

  // Start-point shift to the first-harmonic major axis.
  const double theta =
      0.5 * std::atan2(2.0 * (f.a * f.b + f.c * f.d), f.a * f.a + f.c * f.c - f.b * f.b - f.d * f.d);
  EfdCoeffs out;
  out.harmonics.resize(coeffs.harmonics.size());
  for (std::size_t i = 0; i < coeffs.harmonics.size(); ++i) {
    const Harmonic& k = coeffs.harmonics[i];
    const double ang = static_cast<double>(i + 1) * theta;
    const double cs = std::cos(ang), sn = std::sin(ang);
    out.harmonics[i] = {k.a * cs + k.b * sn, -k.a * sn + k.b * cs, k.c * cs + k.d * sn,
                        -k.c * sn + k.d * cs};
  }
  // Rotation aligning the major axis with +x, and scaling it to unit length.
  const double psi = std::atan2(out.harmonics[0].c, out.harmonics[0].a);
  const double semi_major = std::hypot(out.harmonics[0].a, out.harmonics[0].c);
  if (!(semi_major > 0.0)) throw GeometryError("degenerate first harmonic");
  const double cs = std::cos(psi), sn = std::sin(psi);
  for (Harmonic& k : out.harmonics) {
    const Harmonic r = k;
    k.a = (cs * r.a + sn * r.c) / semi_major;
    k.b = (cs * r.b + sn * r.d) / semi_major;
    k.c = (-sn * r.a + cs * r.c) / semi_major;
    k.d = (-sn * r.b + cs * r.d) / semi_major;
  }
  out.harmonics[0].b = 0.0;
  out.harmonics[0].c = 0.0;

  // Half-turn ambiguity: (theta + pi, psi + pi) flips every even harmonic.
  double pivot = 0.0;
  for (std::size_t i = 1; i < out.harmonics.size(); i += 2) {
    const Harmonic& k = out.harmonics[i];
    if (std::abs(k.a) > std::abs(pivot) * (1.0 + 1e-9)) pivot = k.a;
    if (std::abs(k.d) > std::abs(pivot) * (1.0 + 1e-9)) pivot = k.d;
  }
  if (pivot < 0.0) {
    for (std::size_t i = 1; i < out.harmonics.size(); i += 2) {
      Harmonic& k = out.harmonics[i];
      k = {-k.a, -k.b, -k.c, -k.d};
    }
  }
  return out;
}

std::vector<Point> efd_evaluate(const EfdCoeffs& coeffs, int n) {
  if (n < 8) throw GeometryError("reconstruction needs at least 8 points");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(evaluate(coeffs, static_cast<double>(i) / n));
  return pts;
}

Contour efd_reconstruct(const EfdCoeffs& coeffs, int n) { return Contour(efd_evaluate(coeffs, n)); }

double efd_reconstruction_error(const Contour& contour, const EfdCoeffs& coeffs, int samples) {
  if (samples < 8) throw GeometryError("need at least 8 samples");
  const std::vector<double> cum = arc_lengths(contour);
  const double perimeter = cum.back();
  double sum = 0.0;
  std::size_t seg = 0;
  for (int j = 0; j < samples; ++j) {
    const double s = static_cast<double>(j) / samples;
    const Point p = point_at(contour, cum, s * perimeter, seg);
    const Point q = evaluate(coeffs, s);
    sum += (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
  }
  return std::sqrt(sum / samples);
}

std::vector<double> efd_features(const EfdCoeffs& coeffs) {
  std::vector<double> out;
  out.reserve(coeffs.harmonics.size() * 4);
  for (const Harmonic& k : coeffs.harmonics) {
    out.push_back(k.a);
    out.push_back(k.b);
    out.push_back(k.c);
    out.push_back(k.d);
  }
  return out;
}

}  // namespace clustermorph
