#include <cmath>
#include <numbers>

#include "clustermorph/error.hpp"
#include "clustermorph/synth.hpp"

namespace clustermorph {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ConfigError("empty integer range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

double Rng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view layout_name(Layout layout) noexcept {
  switch (layout) {
    case Layout::cylindrical: return "cylindrical";
    case Layout::conical: return "conical";
    case Layout::globular: return "globular";
    case Layout::winged: return "winged";
  }
  return "cylindrical";
}

Layout parse_layout(std::string_view name) {
  for (Layout l : {Layout::cylindrical, Layout::conical, Layout::globular, Layout::winged})
    if (layout_name(l) == name) return l;
  throw ConfigError("unknown layout '" + std::string(name) + "'");
}

std::string_view label_name(Label label) noexcept {
  switch (label) {
    case Label::berry: return "berry";
    case Label::union_mask: return "union";
    case Label::stain: return "stain";
    case Label::rachis: return "rachis";
    case Label::clamp: return "clamp";
    case Label::reference: return "reference";
  }
  return "berry";
}

}  // namespace clustermorph
