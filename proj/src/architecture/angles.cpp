#include <algorithm>

#include "clustermorph/architecture.hpp"
#include "clustermorph/error.hpp"

namespace clustermorph {

AngleVariation angle_variation(const AngleSeries& series) {
  if (series.views.size() < 2) throw GeometryError("angle variation needs two views");
  std::vector<AngleView> views = series.views;
  std::sort(views.begin(), views.end(),
            [](const AngleView& a, const AngleView& b) { return a.angle < b.angle; });
  for (std::size_t i = 1; i < views.size(); ++i)
    if (views[i].angle == views[i - 1].angle)
      throw GeometryError("duplicate angle " + std::to_string(views[i].angle));
  if (views.front().angle != 0) throw GeometryError("no 0 degree view in " + series.cluster_id);
  const AngleView& first = views.front();
  if (!(first.count > 0.0)) throw GeometryError("0 degree view has no berries");

  AngleVariation out;
  for (const AngleView& v : views) {
    out.angles.push_back(v.angle);
    out.count_ratio.push_back(v.count / first.count);
    out.area_ratio.push_back(first.max_berry_area > 0.0 ? v.max_berry_area / first.max_berry_area
                                                        : 0.0);
  }
  return out;
}

AngleView select_max_angle(const AngleSeries& series) {
  if (series.views.empty()) throw GeometryError("no views");
  AngleView best = series.views.front();
  for (const AngleView& v : series.views)
    if (v.count > best.count || (v.count == best.count && v.angle < best.angle)) best = v;
  return best;
}

}  // namespace clustermorph
