#include "clustermorph/kernels.hpp"

#include <bit>
#include <cmath>

namespace clustermorph::kernels::scalar {

std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept {
  std::uint64_t total = 0;
  for (std::uint64_t w : words) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept {
  std::uint64_t total = 0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) {
    total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  }
  return total;
}

double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept {
  const std::size_t n = xs.size();
  if (n < 3 || ys.size() != n) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) sum += xs[i] * ys[i + 1] - xs[i + 1] * ys[i];
  sum += xs[n - 1] * ys[0] - xs[0] * ys[n - 1];
  return sum;
}

void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept {
  const std::size_t n = depth.size();
  for (std::size_t i = 0; i < n; ++i) {
    const float x = x0 + static_cast<float>(i) * step;
    const float dx = x - cx;
    const float h2 = (r2 - dx * dx) - dy2;
    if (!(h2 >= 0.0f)) continue;
    const float z = cz + std::sqrt(h2);
    if (z > depth[i]) {
      depth[i] = z;
      owner[i] = id;
    }
  }
}

}  // namespace clustermorph::kernels::scalar
