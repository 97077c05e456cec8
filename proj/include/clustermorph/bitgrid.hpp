#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustermorph/geometry.hpp"

namespace clustermorph {

/// Dense binary raster, bit-packed in column-major order: pixel (row, col)
/// is bit k = col * height + row. This is the COCO run order, so run-length
/// decoding is a sequence of contiguous bit-range fills and any column span
/// maps to one contiguous word range.
class BitGrid {
 public:
  BitGrid() = default;
  BitGrid(int height, int width);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  bool get(int row, int col) const noexcept {
    const std::size_t k = index(row, col);
    return (words_[k >> 6] >> (k & 63)) & 1u;
  }
  /// Bounds-checked read; pixels outside the grid are background.
  bool at(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_ && get(row, col);
  }
  void set(int row, int col, bool value = true) noexcept;

  /// Set bits [begin, end) in column-major linear order.
  void fill_linear(std::size_t begin, std::size_t end) noexcept;
  bool get_linear(std::size_t k) const noexcept { return (words_[k >> 6] >> (k & 63)) & 1u; }

  /// Foreground pixel count.
  std::size_t count() const noexcept;
  bool any() const noexcept;

  /// Tight bounding box of the foreground; empty box when there is none.
  BBox bounding_box() const noexcept;

  /// Words covering columns [col_begin, col_end). The first and last words
  /// may include bits from neighbouring columns.
  std::span<const std::uint64_t> column_words(int col_begin, int col_end) const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const BitGrid&, const BitGrid&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(col) * static_cast<std::size_t>(height_) +
           static_cast<std::size_t>(row);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// |a AND b| restricted to the shared column span [col_begin, col_end).
/// Grids must have identical dimensions.
std::size_t intersection_count(const BitGrid& a, const BitGrid& b, int col_begin,
                               int col_end);
std::size_t intersection_count(const BitGrid& a, const BitGrid& b);

}  // namespace clustermorph
