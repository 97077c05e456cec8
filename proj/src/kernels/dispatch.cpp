#include "clustermorph/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace clustermorph::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(CLUSTERMORPH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  // CLUSTERMORPH_ISA=scalar pins the reference kernels.
  if (const char* env = std::getenv("CLUSTERMORPH_ISA"); env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
  }
  return best_available_isa();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa best_available_isa() noexcept {
  static const bool avx2 = cpu_has_avx2();
  return avx2 ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && best_available_isa() != Isa::avx2) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

#if defined(CLUSTERMORPH_HAVE_AVX2)
#define CLUSTERMORPH_DISPATCH(fn, ...)                                   \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define CLUSTERMORPH_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept {
  return CLUSTERMORPH_DISPATCH(popcount, words);
}

std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept {
  return CLUSTERMORPH_DISPATCH(popcount_and, a, b);
}

double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept {
  return CLUSTERMORPH_DISPATCH(shoelace, xs, ys);
}

void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept {
  CLUSTERMORPH_DISPATCH(zbuffer_sphere_row, depth, owner, x0, step, cx, dy2, r2, cz, id);
}

#if !defined(CLUSTERMORPH_HAVE_AVX2)
// Non-x86 builds: keep the avx2:: symbols linkable so equivalence tests
// compile everywhere; they forward to the reference kernels.
namespace avx2 {
std::uint64_t popcount(std::span<const std::uint64_t> w) noexcept { return scalar::popcount(w); }
std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept {
  return scalar::popcount_and(a, b);
}
double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept {
  return scalar::shoelace(xs, ys);
}
void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner, float x0,
                        float step, float cx, float dy2, float r2, float cz,
                        std::int32_t id) noexcept {
  scalar::zbuffer_sphere_row(depth, owner, x0, step, cx, dy2, r2, cz, id);
}
}  // namespace avx2
#endif

}  // namespace clustermorph::kernels
