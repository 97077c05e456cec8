#pragma once
// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; SIMD variants are chosen at runtime from the CPU's
// feature set and must agree with the reference (bit-exact for the integer
// and z-buffer kernels, to rounding for the floating-point reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace clustermorph::kernels {

enum class Isa { scalar, avx2 };

/// The instruction set currently used for dispatch.
Isa active_isa() noexcept;

/// Best instruction set supported by both the build and the running CPU.
Isa best_available_isa() noexcept;

/// Force a specific instruction set. Requests for an unsupported ISA fall
/// back to scalar. Returns the ISA actually selected.
Isa set_isa(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

/// Number of set bits.
std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept;

/// Number of bits set in both operands. Spans must be the same length.
std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept;

/// Twice the signed area of the closed polygon (xs[i], ys[i]):
/// sum over i of xs[i]*ys[i+1] - xs[i+1]*ys[i], indices taken cyclically.
double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept;

/// Depth test of one sphere against one z-buffer row.
///
/// For every pixel i in the row, with dx = x0 + i*step - cx, the sphere's
/// front surface height is h = sqrt(r2 - dx*dx - dy2) when the argument is
/// non-negative. When cz + h > depth[i] the pixel is claimed: depth[i] and
/// owner[i] are overwritten with cz + h and id. Larger depth is nearer.
void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept;

namespace scalar {
std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept;
std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept;
double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept;
void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept;
}  // namespace scalar

namespace avx2 {
std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept;
std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept;
double shoelace(std::span<const double> xs, std::span<const double> ys) noexcept;
void zbuffer_sphere_row(std::span<float> depth, std::span<std::int32_t> owner,
                        float x0, float step, float cx, float dy2, float r2,
                        float cz, std::int32_t id) noexcept;
}  // namespace avx2

}  // namespace clustermorph::kernels
