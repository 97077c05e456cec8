#include "clustermorph/contour.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "clustermorph/error.hpp"

namespace clustermorph {
namespace {

// Component labels over the foreground bounding box, padded by one pixel so
// neighbour reads never leave the buffer.
struct LocalLabels {
  BBox box;
  int stride = 0;  // padded width
  std::vector<std::int32_t> label;
  std::int32_t best = 0;
  std::size_t best_size = 0;

  std::int32_t at(int row, int col) const {  // image coordinates
    const int r = row - box.y + 1;
    const int c = col - box.x + 1;
    return label[static_cast<std::size_t>(r) * stride + c];
  }
};

LocalLabels label_components(const BitGrid& grid) {
  LocalLabels out;
  out.box = grid.bounding_box();
  if (out.box.empty()) throw EmptyMaskError("mask has no foreground pixels");
  const int h = out.box.h + 2;
  out.stride = out.box.w + 2;
  out.label.assign(static_cast<std::size_t>(h) * out.stride, -1);
  for (int r = 0; r < out.box.h; ++r) {
    for (int c = 0; c < out.box.w; ++c) {
      if (grid.get(out.box.y + r, out.box.x + c)) {
        out.label[static_cast<std::size_t>(r + 1) * out.stride + c + 1] = 0;
      }
    }
  }
  // 0 = unvisited foreground, -1 = background, k>0 = component k.
  std::vector<std::size_t> stack;
  std::int32_t next = 1;
  // Row-major scan so the first component found is the top-left-most one,
  // which makes tie-breaking between equal components deterministic.
  for (int r = 1; r <= out.box.h; ++r) {
    for (int c = 1; c <= out.box.w; ++c) {
      const std::size_t seed = static_cast<std::size_t>(r) * out.stride + c;
      if (out.label[seed] != 0) continue;
      std::size_t size = 0;
      out.label[seed] = next;
      stack.push_back(seed);
      while (!stack.empty()) {
        const std::size_t k = stack.back();
        stack.pop_back();
        ++size;
        const std::size_t nbr[4] = {k - 1, k + 1, k - out.stride, k + out.stride};
        for (std::size_t n : nbr) {
          if (out.label[n] == 0) {
            out.label[n] = next;
            stack.push_back(n);
          }
        }
      }
      if (size > out.best_size) {
        out.best_size = size;
        out.best = next;
      }
      ++next;
    }
  }
  return out;
}

}  // namespace

BitGrid largest_component(const BitGrid& grid) {
  const LocalLabels labels = label_components(grid);
  BitGrid out(grid.height(), grid.width());
  for (int r = 0; r < labels.box.h; ++r) {
    for (int c = 0; c < labels.box.w; ++c) {
      if (labels.at(labels.box.y + r, labels.box.x + c) == labels.best) {
        out.set(labels.box.y + r, labels.box.x + c);
      }
    }
  }
  return out;
}

Contour extract_contour(const BitGrid& grid) {
  const LocalLabels labels = label_components(grid);
  const BBox& box = labels.box;
  auto inside = [&](int col, int row) {
    if (row < box.y || col < box.x || row >= box.y + box.h || col >= box.x + box.w) return false;
    return labels.at(row, col) == labels.best;
  };

  // Topmost-then-leftmost pixel of the component; its top-left corner is on
  // the outer boundary and the top edge is walked in +x with the region on
  // the left (positive orientation in x/y with y pointing down the image).
  int start_row = -1, start_col = -1;
  for (int r = box.y; r < box.y + box.h && start_row < 0; ++r) {
    for (int c = box.x; c < box.x + box.w; ++c) {
      if (inside(c, r)) {
        start_row = r;
        start_col = c;
        break;
      }
    }
  }

  std::vector<Point> pts;
  int x = start_col, y = start_row;
  int dx = 1, dy = 0;
  const int sx = x, sy = y;
  // Pixels ahead of corner (x, y) for each direction: front-left, front-right
  // given as (col, row). Left of direction (dx, dy) is (-dy, dx).
  auto front = [&](int ddx, int ddy, bool left) -> bool {
    if (ddx == 1) return left ? inside(x, y) : inside(x, y - 1);
    if (ddx == -1) return left ? inside(x - 1, y - 1) : inside(x - 1, y);
    if (ddy == 1) return left ? inside(x - 1, y) : inside(x, y);
    return left ? inside(x, y - 1) : inside(x - 1, y - 1);
  };
  pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  const std::size_t guard = 4 * (static_cast<std::size_t>(box.w) + 1) * (box.h + 1) + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    const bool fl = front(dx, dy, true);
    const bool fr = front(dx, dy, false);
    int ndx = dx, ndy = dy;
    if (!fl) {  // region ends: turn left
      ndx = -dy;
      ndy = dx;
    } else if (fr) {  // region continues on the right: turn right
      ndx = dy;
      ndy = -dx;
    }
    if (ndx != dx || ndy != dy) {
      if (!(x == sx && y == sy)) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
      dx = ndx;
      dy = ndy;
      if (x == sx && y == sy && dx == 1 && dy == 0) break;
      continue;  // turning does not move
    }
    x += dx;
    y += dy;
  }
  return Contour(std::move(pts));
}

}  // namespace clustermorph
