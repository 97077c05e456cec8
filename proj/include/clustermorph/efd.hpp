#pragma once

#include <vector>

#include "clustermorph/geometry.hpp"

namespace clustermorph {

/// Coefficients of one elliptic Fourier harmonic:
/// x(t) += a cos(h w t) + b sin(h w t), y(t) += c cos(h w t) + d sin(h w t).
struct Harmonic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

struct EfdCoeffs {
  std::vector<Harmonic> harmonics;  ///< harmonics[0] is the first harmonic
  double a0 = 0.0;                  ///< x offset (centroid of the outline curve)
  double c0 = 0.0;                  ///< y offset

  std::size_t count() const noexcept { return harmonics.size(); }
};

/// Elliptic Fourier fit over the arc-length parameterisation of the closed
/// polygon (Kuhl and Giardina). Needs at least 2H+2 vertices.
EfdCoeffs efd_fit(const Contour& contour, int harmonic_count);

/// Size, rotation and start-point normalisation. The result has a zero
/// offset, a_1 = 1 and b_1 = c_1 = 0. The residual half-turn ambiguity of
/// the first-harmonic ellipse is resolved by requiring the largest |a_h| or
/// |d_h| over even h to be positive, a rule that is unaffected by mirroring.
/// Throws GeometryError when the first harmonic is degenerate.
EfdCoeffs efd_normalize(const EfdCoeffs& coeffs);

/// Evaluate the series at n uniformly spaced parameter values (n >= 8).
Contour efd_reconstruct(const EfdCoeffs& coeffs, int n);
/// Same as efd_reconstruct but returns raw points, which may self-intersect.
std::vector<Point> efd_evaluate(const EfdCoeffs& coeffs, int n);

/// RMS distance between the outline and its series evaluated at the same
/// arc-length positions, over `samples` uniformly spaced positions. By
/// Parseval this is non-increasing in the harmonic count.
double efd_reconstruction_error(const Contour& contour, const EfdCoeffs& coeffs,
                                int samples = 2048);

/// Flattened (a_1, b_1, c_1, d_1, a_2, ...) feature vector.
std::vector<double> efd_features(const EfdCoeffs& coeffs);

}  // namespace clustermorph
