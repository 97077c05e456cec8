#pragma once

#include <cstdint>
#include <vector>

#include "clustermorph/bitgrid.hpp"

namespace clustermorph {

/// COCO uncompressed run-length mask: alternating background/foreground run
/// lengths over the column-major pixel sequence, starting with background.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

/// Throws MalformedRleError if the runs do not cover height*width pixels.
BitGrid decode_rle(const RleMask& rle);

/// Canonical encoding: a leading zero run when pixel 0 is foreground, no
/// other zero-length runs.
RleMask encode_rle(const BitGrid& grid);

/// Sum of the odd-indexed runs.
std::uint64_t rle_area(const RleMask& rle) noexcept;

}  // namespace clustermorph
