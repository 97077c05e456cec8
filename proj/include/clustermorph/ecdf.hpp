#pragma once

#include <array>
#include <span>
#include <string_view>

#include "clustermorph/geometry.hpp"

namespace clustermorph {

enum class Axis { x, y };

/// Cumulative fraction of berries whose min-max scaled coordinate (0..100)
/// is at most t, sampled at t = 1..100.
struct EcdfProfile {
  Axis axis = Axis::x;
  std::array<double, 100> values{};

  double at(int t) const { return values.at(static_cast<std::size_t>(t - 1)); }
};

/// Throws GeometryError for fewer than two points or zero extent on the axis.
EcdfProfile ecdf_profile(std::span<const Point> centroids, Axis axis);

struct EcdfDescriptors {
  double f25 = 0.0;
  double f50 = 0.0;
  double f75 = 0.0;
};

EcdfDescriptors ecdf_descriptors(const EcdfProfile& profile);

/// Accumulation classes: green (berries concentrated near the start of the
/// axis), purple (near the end), gray (evenly spread), other.
enum class EcdfClass { green, purple, gray, other };

EcdfClass classify_ecdf(const EcdfDescriptors& d);
std::string_view ecdf_class_name(EcdfClass c) noexcept;

}  // namespace clustermorph
