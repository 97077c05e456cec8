#include "cli/metadata.hpp"

#include <cmath>
#include <fstream>

#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"

namespace clustermorph::cli {

Metadata Metadata::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open metadata file " + path.string());
  return parse(in, path.parent_path());
}

Metadata Metadata::parse(std::istream& in, const std::filesystem::path& base_dir) {
  const CsvTable csv = read_csv(in);
  const long id_col = csv.column("image_id");
  if (id_col < 0) throw ParseError("metadata lacks an image_id column");
  auto col = [&](const char* name) { return csv.column(name); };
  const long g = col("genotype"), b = col("block"), v = col("vine"), c = col("cluster"),
             a = col("angle"), rx = col("roi_x"), ry = col("roi_y"), rw = col("roi_w"),
             rh = col("roi_h"), ras = col("raster"), tc = col("true_count");

  Metadata md;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& f = csv.rows[r];
    const long row = static_cast<long>(r + 1);
    auto cell = [&](long i) -> std::string { return i < 0 ? std::string() : f[static_cast<std::size_t>(i)]; };

    ImageMeta m;
    m.image_id = cell(id_col);
    if (m.image_id.empty()) throw ParseError("empty image_id", row);
    m.key.genotype = cell(g);
    m.key.block = cell(b);
    m.key.vine = cell(v);
    m.key.cluster = cell(c);
    m.has_key = !m.key.genotype.empty();
    if (const std::string s = cell(a); !s.empty()) {
      const double angle = parse_number(s, row);
      if (angle != std::floor(angle)) throw ParseError("angle must be an integer", row);
      m.key.angle = static_cast<int>(angle);
    }

    const std::string roi[4] = {cell(rx), cell(ry), cell(rw), cell(rh)};
    const int given = !roi[0].empty() + !roi[1].empty() + !roi[2].empty() + !roi[3].empty();
    if (given == 4) {
      int vals[4];
      for (int i = 0; i < 4; ++i) {
        const double d = parse_number(roi[i], row);
        if (d != std::floor(d)) throw ParseError("roi values must be integers", row);
        vals[i] = static_cast<int>(d);
      }
      if (vals[2] <= 0 || vals[3] <= 0) throw ParseError("roi width and height must be positive", row);
      m.roi = BBox{vals[0], vals[1], vals[2], vals[3]};
    } else if (given != 0) {
      throw ParseError("roi needs all of roi_x, roi_y, roi_w, roi_h", row);
    }

    if (const std::string s = cell(ras); !s.empty()) {
      std::filesystem::path p(s);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      m.raster = p;
    }
    if (const std::string s = cell(tc); !s.empty()) m.true_count = parse_number(s, row);

    const std::string id = m.image_id;
    if (!md.rows_.emplace(id, std::move(m)).second)
      throw ParseError("duplicate image_id '" + id + "'", row);
  }
  return md;
}

const ImageMeta* Metadata::find(const std::string& image_id) const {
  auto it = rows_.find(image_id);
  return it == rows_.end() ? nullptr : &it->second;
}

bool inside_roi(const BBox& roi, const BBox& mask_bbox) {
  const double cx = mask_bbox.x + 0.5 * mask_bbox.w;
  const double cy = mask_bbox.y + 0.5 * mask_bbox.h;
  return cx >= roi.x && cx <= roi.x + roi.w && cy >= roi.y && cy <= roi.y + roi.h;
}

}  // namespace clustermorph::cli
