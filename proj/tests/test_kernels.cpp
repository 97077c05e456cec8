#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "clustermorph/kernels.hpp"
#include "clustermorph/synth.hpp"

namespace k = clustermorph::kernels;
using clustermorph::Rng;

namespace {

bool have_avx2() { return k::best_available_isa() == k::Isa::avx2; }

std::vector<std::uint64_t> random_words(Rng& rng, std::size_t n) {
  std::vector<std::uint64_t> w(n);
  for (auto& x : w) x = rng.next();
  return w;
}

}  // namespace

TEST(Kernels, PopcountMatchesStdBitAcrossLengths) {
  Rng rng(11);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto w = random_words(rng, n);
    std::uint64_t expect = 0;
    for (auto x : w) expect += static_cast<std::uint64_t>(std::popcount(x));
    EXPECT_EQ(k::scalar::popcount(w), expect);
    if (have_avx2()) {
      EXPECT_EQ(k::avx2::popcount(w), expect) << "n=" << n;
    }
  }
}

TEST(Kernels, PopcountAndAgreesWithScalar) {
  Rng rng(12);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_words(rng, n);
    const auto b = random_words(rng, n);
    std::uint64_t expect = 0;
    for (std::size_t i = 0; i < n; ++i) expect += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    EXPECT_EQ(k::scalar::popcount_and(a, b), expect);
    if (have_avx2()) {
      EXPECT_EQ(k::avx2::popcount_and(a, b), expect);
    }
  }
}

TEST(Kernels, ShoelaceVariantsAgreeToRounding) {
  Rng rng(13);
  for (std::size_t n = 3; n < 200; n += 7) {
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2 * M_PI * static_cast<double>(i) / static_cast<double>(n);
      const double r = 50 + rng.uniform(-5, 5);
      xs[i] = 400 + r * std::cos(t);
      ys[i] = 300 + r * std::sin(t);
    }
    long double ref = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      ref += static_cast<long double>(xs[i]) * ys[j] - static_cast<long double>(xs[j]) * ys[i];
    }
    const double s = k::scalar::shoelace(xs, ys);
    EXPECT_NEAR(s, static_cast<double>(ref), 1e-9 * std::abs(static_cast<double>(ref)));
    if (have_avx2()) {
      EXPECT_NEAR(k::avx2::shoelace(xs, ys), s, 1e-9 * std::abs(s));
    }
  }
}

TEST(Kernels, ZbufferRowBitExact) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2 on this machine";
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 97));
    std::vector<float> d1(n), d2;
    std::vector<std::int32_t> o1(n, -1), o2;
    for (auto& d : d1) d = static_cast<float>(rng.uniform(-20, 20));
    d2 = d1;
    o2 = o1;
    const float x0 = static_cast<float>(rng.uniform(-10, 10));
    const float step = 0.5f;
    const float cx = static_cast<float>(rng.uniform(-10, 40));
    const float dy2 = static_cast<float>(rng.uniform(0, 30));
    const float r2 = static_cast<float>(rng.uniform(10, 200));
    const float cz = static_cast<float>(rng.uniform(-10, 10));
    k::scalar::zbuffer_sphere_row(d1, o1, x0, step, cx, dy2, r2, cz, trial);
    k::avx2::zbuffer_sphere_row(d2, o2, x0, step, cx, dy2, r2, cz, trial);
    ASSERT_EQ(o1, o2);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(std::bit_cast<std::uint32_t>(d1[i]), std::bit_cast<std::uint32_t>(d2[i]));
  }
}

TEST(Kernels, DispatchCanBeForcedToScalar) {
  const k::Isa before = k::active_isa();
  EXPECT_EQ(k::set_isa(k::Isa::scalar), k::Isa::scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::scalar);
  const std::vector<std::uint64_t> w = {~0ull, 1ull};
  EXPECT_EQ(k::popcount(w), 65u);
  k::set_isa(before);
  EXPECT_EQ(k::isa_name(k::Isa::scalar), "scalar");
}
