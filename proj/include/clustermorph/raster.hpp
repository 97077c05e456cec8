#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "clustermorph/bitgrid.hpp"

namespace clustermorph {

/// 8-bit interleaved RGB image, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Raster() = default;
  Raster(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int row, int col) {
    return rgb.data() + (static_cast<std::size_t>(row) * width + col) * 3;
  }
  const std::uint8_t* pixel(int row, int col) const {
    return rgb.data() + (static_cast<std::size_t>(row) * width + col) * 3;
  }
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Load a PNG or JPEG (detected from the file signature) as 8-bit RGB.
Raster load_raster(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Raster& raster);

/// Channel-wise median over the mask's foreground pixels. An even pixel
/// count averages the two middle values.
Rgb median_color(const Raster& raster, const BitGrid& mask);

}  // namespace clustermorph
