#include "clustermorph/raster.hpp"

#include <array>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "clustermorph/error.hpp"

namespace clustermorph {
namespace {

Raster load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw ParseError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Raster out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr) == 0) {
    png_image_free(&image);
    throw ParseError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

// Decodes into `out`; returns false with err.message set on failure. Kept
// free of objects with destructors between setjmp and longjmp.
bool decode_jpeg(FILE* file, Raster& out, JpegErrorManager& err) {
  jpeg_decompress_struct info;
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump) != 0) {
    jpeg_destroy_decompress(&info);
    return false;
  }
  jpeg_create_decompress(&info);
  jpeg_stdio_src(&info, file);
  jpeg_read_header(&info, TRUE);
  info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  out.width = static_cast<int>(info.output_width);
  out.height = static_cast<int>(info.output_height);
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = out.pixel(static_cast<int>(info.output_scanline), 0);
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return true;
}

Raster load_jpeg(const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw ParseError("cannot open " + path.string());
  Raster out;
  JpegErrorManager err;
  if (!decode_jpeg(file.get(), out, err)) {
    throw ParseError("cannot decode JPEG " + path.string() + ": " + err.message);
  }
  return out;
}

double channel_median(const std::array<std::uint64_t, 256>& hist, std::uint64_t n) {
  // Lower and upper middle order statistics (0-based ranks).
  const std::uint64_t lo_rank = (n - 1) / 2;
  const std::uint64_t hi_rank = n / 2;
  int lo = -1, hi = -1;
  std::uint64_t seen = 0;
  for (int v = 0; v < 256; ++v) {
    seen += hist[static_cast<std::size_t>(v)];
    if (lo < 0 && seen > lo_rank) lo = v;
    if (seen > hi_rank) {
      hi = v;
      break;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Raster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open raster " + path.string());
  unsigned char magic[4] = {0, 0, 0, 0};
  in.read(reinterpret_cast<char*>(magic), 4);
  in.close();
  if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G') {
    return load_png(path);
  }
  if (magic[0] == 0xFF && magic[1] == 0xD8) return load_jpeg(path);
  throw ParseError("unsupported raster format (expected PNG or JPEG): " + path.string());
}

void save_png(const std::filesystem::path& path, const Raster& raster) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width);
  image.height = static_cast<png_uint_32>(raster.height);
  image.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&image, path.c_str(), 0, raster.rgb.data(), 0, nullptr) == 0) {
    throw ParseError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

Rgb median_color(const Raster& raster, const BitGrid& mask) {
  if (raster.height < mask.height() || raster.width < mask.width()) {
    throw DimensionError("raster is smaller than the mask");
  }
  std::array<std::uint64_t, 256> hr{}, hg{}, hb{};
  std::uint64_t n = 0;
  const BBox box = mask.bounding_box();
  if (box.empty()) throw EmptyMaskError("median color of an empty mask");
  for (int c = box.x; c < box.x + box.w; ++c) {
    for (int r = box.y; r < box.y + box.h; ++r) {
      if (!mask.get(r, c)) continue;
      const std::uint8_t* p = raster.pixel(r, c);
      ++hr[p[0]];
      ++hg[p[1]];
      ++hb[p[2]];
      ++n;
    }
  }
  return {channel_median(hr, n), channel_median(hg, n), channel_median(hb, n)};
}

}  // namespace clustermorph
