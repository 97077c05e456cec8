#include "clustermorph/mask_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clustermorph/error.hpp"

namespace clustermorph {
namespace {

using nlohmann::json;

std::string id_string(const json& value, const char* what, long index) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError(std::string(what) + " must be a string or integer", index);
}

int integral(const json& value, const char* what, long index) {
  if (value.is_number_integer()) return value.get<int>();
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (std::floor(d) == d) return static_cast<int>(d);
  }
  throw ParseError(std::string(what) + " must be an integer", index);
}

double score(const json& obj, const char* key, long index) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(std::string("missing numeric field '") + key + "'", index);
  }
  const double v = obj[key].get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParseError(std::string("field '") + key + "' outside [0,1]", index);
  }
  return v;
}

const json& field(const json& obj, const char* key, long index) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'", index);
  }
  return obj[key];
}

MaskRecord parse_record(const json& m, const MaskFile& file, long index) {
  if (!m.is_object()) throw ParseError("mask entry is not an object", index);
  MaskRecord r;
  r.id = id_string(field(m, "id", index), "id", index);
  r.image_id = file.image_id;

  const json& bbox = field(m, "bbox", index);
  if (!bbox.is_array() || bbox.size() != 4) throw ParseError("bbox must be [x,y,w,h]", index);
  r.bbox = {integral(bbox[0], "bbox", index), integral(bbox[1], "bbox", index),
            integral(bbox[2], "bbox", index), integral(bbox[3], "bbox", index)};

  const json& area = field(m, "area", index);
  const int area_value = integral(area, "area", index);
  if (area_value < 0) throw ParseError("area must be non-negative", index);
  r.area_px = static_cast<std::uint64_t>(area_value);

  const json& rle = field(m, "rle", index);
  const json& size = field(rle, "size", index);
  if (!size.is_array() || size.size() != 2) throw ParseError("rle.size must be [h,w]", index);
  r.rle.height = integral(size[0], "rle.size", index);
  r.rle.width = integral(size[1], "rle.size", index);
  if (r.rle.height != file.height || r.rle.width != file.width) {
    throw ParseError("rle.size does not match the image size", index);
  }
  const json& counts = field(rle, "counts", index);
  if (!counts.is_array()) {
    throw ParseError("rle.counts must be an integer list (compressed strings are unsupported)",
                     index);
  }
  r.rle.counts.reserve(counts.size());
  for (const json& c : counts) {
    const int v = integral(c, "rle.counts", index);
    if (v < 0) throw ParseError("negative run length", index);
    r.rle.counts.push_back(static_cast<std::uint32_t>(v));
  }

  r.predicted_iou = score(m, "predicted_iou", index);
  r.stability = score(m, "stability_score", index);
  return r;
}

}  // namespace

void validate_record(const MaskRecord& record, long index) {
  BitGrid grid;
  try {
    grid = decode_rle(record.rle);
  } catch (const MalformedRleError& e) {
    throw ValidationError(std::string("record ") + std::to_string(index) + ": " + e.what(), index);
  }
  const std::size_t count = grid.count();
  if (count != record.area_px) {
    throw ValidationError("record " + std::to_string(index) + " ('" + record.id + "'): area " +
                              std::to_string(record.area_px) + " but mask has " +
                              std::to_string(count) + " pixels",
                          index);
  }
  const BBox tight = grid.bounding_box();
  if (!(tight == record.bbox)) {
    throw ValidationError("record " + std::to_string(index) + " ('" + record.id +
                              "'): bbox does not tightly bound the mask",
                          index);
  }
}

MaskFile parse_mask_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("mask file must be a JSON object");
  MaskFile file;
  file.image_id = id_string(field(doc, "image_id", -1), "image_id", -1);
  file.width = integral(field(doc, "width", -1), "width", -1);
  file.height = integral(field(doc, "height", -1), "height", -1);
  if (file.width <= 0 || file.height <= 0) throw ParseError("image size must be positive");
  const json& masks = field(doc, "masks", -1);
  if (!masks.is_array()) throw ParseError("'masks' must be an array");
  file.masks.reserve(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const long index = static_cast<long>(i);
    MaskRecord r;
    try {
      r = parse_record(masks[i], file, index);
    } catch (const json::exception& e) {
      throw ParseError("record " + std::to_string(index) + ": " + e.what(), index);
    } catch (const ParseError& e) {
      if (std::string(e.what()).rfind("record ", 0) == 0) throw;
      throw ParseError("record " + std::to_string(index) + ": " + e.what(), index);
    }
    validate_record(r, index);
    file.masks.push_back(std::move(r));
  }
  return file;
}

MaskFile load_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mask file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mask_json(buffer.str());
}

std::string to_mask_json(const MaskFile& file) {
  std::string out;
  out += "{\"image_id\":" + json(file.image_id).dump();
  out += ",\"width\":" + std::to_string(file.width);
  out += ",\"height\":" + std::to_string(file.height);
  out += ",\"masks\":[";
  for (std::size_t i = 0; i < file.masks.size(); ++i) {
    const MaskRecord& r = file.masks[i];
    nlohmann::ordered_json m;
    m["id"] = r.id;
    m["bbox"] = {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h};
    m["area"] = r.area_px;
    m["rle"]["size"] = {r.rle.height, r.rle.width};
    m["rle"]["counts"] = r.rle.counts;
    m["predicted_iou"] = r.predicted_iou;
    m["stability_score"] = r.stability;
    out += (i == 0 ? "\n" : ",\n");
    out += m.dump();
  }
  out += "\n]}\n";
  return out;
}

void save_mask_file(const std::filesystem::path& path, const MaskFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write mask file " + path.string());
  out << to_mask_json(file);
  if (!out) throw ParseError("write failed for " + path.string());
}

MaskRecord make_record(std::string id, std::string image_id, const BitGrid& grid,
                       double predicted_iou, double stability) {
  MaskRecord r;
  r.id = std::move(id);
  r.image_id = std::move(image_id);
  r.rle = encode_rle(grid);
  r.area_px = grid.count();
  r.bbox = grid.bounding_box();
  r.predicted_iou = predicted_iou;
  r.stability = stability;
  return r;
}

}  // namespace clustermorph
