#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "clustermorph/geometry.hpp"
#include "clustermorph/traits.hpp"

namespace clustermorph::cli {

/// Per-image metadata row. Only image_id is required; an image without
/// genotype gets no trait row keyed to a genotype.
struct ImageMeta {
  std::string image_id;
  TraitKey key;
  bool has_key = false;
  std::optional<BBox> roi;
  std::optional<std::filesystem::path> raster;
  std::optional<double> true_count;
};

/// CSV with a header. Columns: image_id (required), genotype, block, vine,
/// cluster, angle, roi_x, roi_y, roi_w, roi_h, raster, true_count. Empty
/// cells mean "not given". Raster paths resolve against the CSV's folder.
class Metadata {
 public:
  static Metadata load(const std::filesystem::path& path);
  static Metadata parse(std::istream& in, const std::filesystem::path& base_dir = {});

  const ImageMeta* find(const std::string& image_id) const;
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  std::map<std::string, ImageMeta> rows_;
};

/// ROI rule: a mask is inside when its bbox centre lies inside the ROI.
bool inside_roi(const BBox& roi, const BBox& mask_bbox);

}  // namespace clustermorph::cli
