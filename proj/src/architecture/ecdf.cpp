#include "clustermorph/ecdf.hpp"

#include <algorithm>

#include "clustermorph/error.hpp"

namespace clustermorph {

EcdfProfile ecdf_profile(std::span<const Point> centroids, Axis axis) {
  if (centroids.size() < 2) throw GeometryError("ECDF needs at least two centroids");
  std::vector<double> v;
  v.reserve(centroids.size());
  for (const Point& p : centroids) v.push_back(axis == Axis::x ? p.x : p.y);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double extent = *hi - min;
  if (!(extent > 0.0)) throw GeometryError("ECDF axis has zero extent");
  for (double& x : v) x = (x - min) / extent * 100.0;
  std::sort(v.begin(), v.end());

  EcdfProfile out;
  out.axis = axis;
  const double n = static_cast<double>(v.size());
  // The slack absorbs rounding in the scaling, e.g. 37/100*100.
  for (int t = 1; t <= 100; ++t) {
    const auto le = std::upper_bound(v.begin(), v.end(), t + 1e-9) - v.begin();
    out.values[static_cast<std::size_t>(t - 1)] = static_cast<double>(le) / n;
  }
  out.values[99] = 1.0;
  return out;
}

EcdfDescriptors ecdf_descriptors(const EcdfProfile& p) { return {p.at(25), p.at(50), p.at(75)}; }

EcdfClass classify_ecdf(const EcdfDescriptors& d) {
  if (d.f25 > 0.3 && d.f75 > 0.8) return EcdfClass::green;
  if (d.f25 < 0.2 && d.f75 < 0.7) return EcdfClass::purple;
  if (d.f25 >= 0.2 && d.f25 <= 0.3 && d.f50 >= 0.45 && d.f50 <= 0.55 && d.f75 >= 0.7 &&
      d.f75 <= 0.8)
    return EcdfClass::gray;
  return EcdfClass::other;
}

std::string_view ecdf_class_name(EcdfClass c) noexcept {
  switch (c) {
    case EcdfClass::green: return "green";
    case EcdfClass::purple: return "purple";
    case EcdfClass::gray: return "gray";
    case EcdfClass::other: return "other";
  }
  return "other";
}

}  // namespace clustermorph
