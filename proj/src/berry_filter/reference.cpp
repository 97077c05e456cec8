#include <cmath>
#include <numbers>
#include <sstream>

#include "clustermorph/error.hpp"
#include "clustermorph/filter.hpp"

namespace clustermorph {

ScaleCalibration detect_reference(std::span<const MaskRecord> masks,
                                  std::span<const PreparedMask> prepared,
                                  const ReferenceSpec& spec) {
  if (!(spec.diameter_mm > 0.0) || !(spec.min_diameter_px < spec.max_diameter_px))
    throw CalibrationError("reference spec needs a positive diameter and a valid pixel range");
  std::vector<ScaleCalibration> found;
  std::ostringstream near;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const PreparedMask& p = prepared[i];
    if (!p.smooth) continue;
    const double circ = circularity(p.metrics);
    const double diameter = 2.0 * std::sqrt(p.area_px / std::numbers::pi);
    if (circ < kReferenceCircularity) continue;
    if (diameter < spec.min_diameter_px || diameter > spec.max_diameter_px) continue;
    found.push_back({spec.diameter_mm / diameter, masks[i].id, std::min(circ, 1.0), diameter});
  }
  if (found.size() == 1) return found.front();
  std::ostringstream msg;
  if (found.empty()) {
    msg << "no reference circle: no mask with circularity >= " << kReferenceCircularity
        << " and diameter in [" << spec.min_diameter_px << ", " << spec.max_diameter_px << "] px";
  } else {
    msg << found.size() << " reference candidates:";
    for (const auto& c : found)
      msg << " " << c.reference_mask_id << " (d=" << c.diameter_px << " px, circ=" << c.circularity
          << ")";
  }
  throw CalibrationError(msg.str());
}

ScaleCalibration detect_reference(std::span<const MaskRecord> masks, const ReferenceSpec& spec) {
  std::vector<PreparedMask> prepared;
  prepared.reserve(masks.size());
  for (const auto& m : masks) prepared.push_back(prepare_mask(m));
  return detect_reference(masks, prepared, spec);
}

}  // namespace clustermorph
