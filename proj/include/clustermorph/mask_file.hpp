#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clustermorph/geometry.hpp"
#include "clustermorph/rle.hpp"

namespace clustermorph {

/// One instance mask as emitted by the segmentation stage.
struct MaskRecord {
  std::string id;
  std::string image_id;
  BBox bbox;
  std::uint64_t area_px = 0;
  RleMask rle;
  double predicted_iou = 0.0;
  double stability = 0.0;

  friend bool operator==(const MaskRecord&, const MaskRecord&) = default;
};

/// All masks of one image, in file order.
struct MaskFile {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<MaskRecord> masks;

  friend bool operator==(const MaskFile&, const MaskFile&) = default;
};

/// Parse and validate a mask file. Schema violations raise ParseError and
/// inconsistent area/bbox raise ValidationError; both carry the record index.
MaskFile load_mask_file(const std::filesystem::path& path);
MaskFile parse_mask_json(const std::string& text);

/// Serialise with a stable key order and compact RLE arrays.
std::string to_mask_json(const MaskFile& file);
void save_mask_file(const std::filesystem::path& path, const MaskFile& file);

/// Check a record against its decoded mask (area and tight bbox).
void validate_record(const MaskRecord& record, long index = -1);

/// Build a record (area, bbox, rle) from a raster mask.
MaskRecord make_record(std::string id, std::string image_id, const BitGrid& grid,
                       double predicted_iou = 1.0, double stability = 1.0);

}  // namespace clustermorph
