// Compiled with -mavx2 -mpopcnt; only reached when the CPU reports AVX2.

#include "clustermorph/kernels.hpp"

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace clustermorph::kernels::avx2 {
namespace {

// Nibble-lookup popcount (vpshufb) accumulated with vpsadbw.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

inline std::uint64_t horizontal_sum(__m256i acc) {
  return static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 0)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 1)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 2)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 3));
}

}  // namespace

std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept {
  const std::size_t n = words.size();
  const std::uint64_t* p = words.data();
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()));
  }
  std::uint64_t total = horizontal_sum(acc);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(p[i]));
  return total;
}

std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const std::uint64_t* pa = a.data();
  const std::uint64_t* pb = b.data();
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + i));
    const __m256i v = _mm256_and_si256(va, vb);
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()));
  }
  std::uint64_t total = horizontal_sum(acc);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(pa[i] & pb[i]));
  return total;
}

double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept {
  const std::size_t n = xs.size();
  if (n < 3 || ys.size() != n) return 0.0;
  const double* x = xs.data();
  const double* y = ys.data();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(x + i);
    const __m256d y0 = _mm256_loadu_pd(y + i);
    const __m256d x1 = _mm256_loadu_pd(x + i + 1);
    const __m256d y1 = _mm256_loadu_pd(y + i + 1);
    acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_mul_pd(x0, y1), _mm256_mul_pd(x1, y0)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i + 1 < n; ++i) sum += x[i] * y[i + 1] - x[i + 1] * y[i];
  sum += x[n - 1] * y[0] - x[0] * y[n - 1];
  return sum;
}

void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept {
  const std::size_t n = depth.size();
  float* d = depth.data();
  std::int32_t* o = owner.data();
  const __m256 vx0 = _mm256_set1_ps(x0);
  const __m256 vstep = _mm256_set1_ps(step);
  const __m256 vcx = _mm256_set1_ps(cx);
  const __m256 vdy2 = _mm256_set1_ps(dy2);
  const __m256 vr2 = _mm256_set1_ps(r2);
  const __m256 vcz = _mm256_set1_ps(cz);
  const __m256 zero = _mm256_setzero_ps();
  const __m256i vid = _mm256_set1_epi32(id);
  const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i idx = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(i)), lane);
    const __m256 x = _mm256_add_ps(vx0, _mm256_mul_ps(_mm256_cvtepi32_ps(idx), vstep));
    const __m256 dx = _mm256_sub_ps(x, vcx);
    const __m256 h2 = _mm256_sub_ps(_mm256_sub_ps(vr2, _mm256_mul_ps(dx, dx)), vdy2);
    const __m256 inside = _mm256_cmp_ps(h2, zero, _CMP_GE_OQ);
    const __m256 z = _mm256_add_ps(vcz, _mm256_sqrt_ps(_mm256_max_ps(h2, zero)));
    const __m256 cur = _mm256_loadu_ps(d + i);
    const __m256 take = _mm256_and_ps(inside, _mm256_cmp_ps(z, cur, _CMP_GT_OQ));
    if (_mm256_movemask_ps(take) == 0) continue;
    _mm256_storeu_ps(d + i, _mm256_blendv_ps(cur, z, take));
    const __m256i cur_owner = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(o + i));
    const __m256i new_owner = _mm256_blendv_epi8(cur_owner, vid, _mm256_castps_si256(take));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(o + i), new_owner);
  }
  for (; i < n; ++i) {
    const float x = x0 + static_cast<float>(i) * step;
    const float dx = x - cx;
    const float h2 = (r2 - dx * dx) - dy2;
    if (!(h2 >= 0.0f)) continue;
    const float z = cz + std::sqrt(h2);
    if (z > d[i]) {
      d[i] = z;
      o[i] = id;
    }
  }
}

}  // namespace clustermorph::kernels::avx2
