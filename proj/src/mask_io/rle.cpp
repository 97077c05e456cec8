#include "clustermorph/rle.hpp"

#include <bit>
#include <string>

#include "clustermorph/error.hpp"

namespace clustermorph {

BitGrid decode_rle(const RleMask& rle) {
  if (rle.height < 0 || rle.width < 0) throw MalformedRleError("negative RLE size");
  const std::uint64_t total =
      static_cast<std::uint64_t>(rle.height) * static_cast<std::uint64_t>(rle.width);
  std::uint64_t sum = 0;
  for (std::uint32_t c : rle.counts) sum += c;
  if (sum != total) {
    throw MalformedRleError("RLE runs sum to " + std::to_string(sum) + ", expected " +
                            std::to_string(total));
  }
  BitGrid grid(rle.height, rle.width);
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    const std::uint64_t next = pos + rle.counts[i];
    if (i % 2 == 1) grid.fill_linear(pos, next);
    pos = next;
  }
  return grid;
}

RleMask encode_rle(const BitGrid& grid) {
  RleMask rle;
  rle.height = grid.height();
  rle.width = grid.width();
  const std::size_t n = grid.pixel_count();
  const auto words = grid.words();
  // Walk transitions word by word: within a word, runs of the current value
  // end at the first bit that differs.
  bool value = false;
  std::size_t run_start = 0;
  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t w = pos >> 6;
    const unsigned offset = static_cast<unsigned>(pos & 63);
    std::uint64_t bits = words[w] >> offset;
    if (!value) bits = ~bits;
    // bits now has ones where the pixel equals `value`; count them.
    const unsigned avail = 64 - offset;
    unsigned same = static_cast<unsigned>(std::countr_one(bits));
    if (same > avail) same = avail;
    pos += same;
    if (pos > n) pos = n;
    if (same < avail && pos < n) {
      rle.counts.push_back(static_cast<std::uint32_t>(pos - run_start));
      run_start = pos;
      value = !value;
    }
  }
  rle.counts.push_back(static_cast<std::uint32_t>(n - run_start));
  if (n == 0) rle.counts = {0};
  return rle;
}

std::uint64_t rle_area(const RleMask& rle) noexcept {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

}  // namespace clustermorph
