#include "clustermorph/bitgrid.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "clustermorph/error.hpp"
#include "clustermorph/kernels.hpp"

namespace clustermorph {

BitGrid::BitGrid(int height, int width) : height_(height), width_(width) {
  if (height < 0 || width < 0) throw DimensionError("negative grid dimensions");
  words_.assign((pixel_count() + 63) / 64, 0);
}

void BitGrid::set(int row, int col, bool value) noexcept {
  const std::size_t k = index(row, col);
  const std::uint64_t bit = std::uint64_t{1} << (k & 63);
  if (value) {
    words_[k >> 6] |= bit;
  } else {
    words_[k >> 6] &= ~bit;
  }
}

void BitGrid::fill_linear(std::size_t begin, std::size_t end) noexcept {
  if (begin >= end) return;
  std::size_t first = begin >> 6;
  const std::size_t last = (end - 1) >> 6;
  const std::uint64_t head = ~std::uint64_t{0} << (begin & 63);
  const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((end - 1) & 63));
  if (first == last) {
    words_[first] |= head & tail;
    return;
  }
  words_[first] |= head;
  for (++first; first < last; ++first) words_[first] = ~std::uint64_t{0};
  words_[last] |= tail;
}

std::size_t BitGrid::count() const noexcept {
  return static_cast<std::size_t>(kernels::popcount(words_));
}

bool BitGrid::any() const noexcept {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

BBox BitGrid::bounding_box() const noexcept {
  int min_row = height_, max_row = -1, min_col = width_, max_col = -1;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      bits &= bits - 1;
      const int col = static_cast<int>(k / static_cast<std::size_t>(height_));
      const int row = static_cast<int>(k % static_cast<std::size_t>(height_));
      min_row = std::min(min_row, row);
      max_row = std::max(max_row, row);
      min_col = std::min(min_col, col);
      max_col = std::max(max_col, col);
    }
  }
  if (max_row < 0) return {};
  return {min_col, min_row, max_col - min_col + 1, max_row - min_row + 1};
}

std::span<const std::uint64_t> BitGrid::column_words(int col_begin, int col_end) const noexcept {
  col_begin = std::clamp(col_begin, 0, width_);
  col_end = std::clamp(col_end, col_begin, width_);
  if (col_begin == col_end || height_ == 0) return {};
  const std::size_t bit_begin = static_cast<std::size_t>(col_begin) * height_;
  const std::size_t bit_end = static_cast<std::size_t>(col_end) * height_;
  const std::size_t w0 = bit_begin >> 6;
  const std::size_t w1 = (bit_end + 63) >> 6;
  return std::span<const std::uint64_t>(words_).subspan(w0, w1 - w0);
}

std::size_t intersection_count(const BitGrid& a, const BitGrid& b, int col_begin, int col_end) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("intersection of grids with different dimensions");
  }
  // Boundary words may carry bits of neighbouring columns; mask them off.
  col_begin = std::clamp(col_begin, 0, a.width());
  col_end = std::clamp(col_end, col_begin, a.width());
  if (col_begin == col_end) return 0;
  const std::size_t bit_begin = static_cast<std::size_t>(col_begin) * a.height();
  const std::size_t bit_end = static_cast<std::size_t>(col_end) * a.height();
  const std::size_t w0 = bit_begin >> 6;
  const std::size_t w1 = (bit_end - 1) >> 6;
  auto wa = a.words();
  auto wb = b.words();
  if (w0 == w1) {
    std::uint64_t m = (~std::uint64_t{0} << (bit_begin & 63)) &
                      (~std::uint64_t{0} >> (63 - ((bit_end - 1) & 63)));
    return static_cast<std::size_t>(std::popcount(wa[w0] & wb[w0] & m));
  }
  std::size_t total = static_cast<std::size_t>(
      std::popcount(wa[w0] & wb[w0] & (~std::uint64_t{0} << (bit_begin & 63))));
  total += static_cast<std::size_t>(
      std::popcount(wa[w1] & wb[w1] & (~std::uint64_t{0} >> (63 - ((bit_end - 1) & 63)))));
  if (w1 > w0 + 1) {
    total += static_cast<std::size_t>(
        kernels::popcount_and(wa.subspan(w0 + 1, w1 - w0 - 1), wb.subspan(w0 + 1, w1 - w0 - 1)));
  }
  return total;
}

std::size_t intersection_count(const BitGrid& a, const BitGrid& b) {
  return intersection_count(a, b, 0, a.width());
}

}  // namespace clustermorph
