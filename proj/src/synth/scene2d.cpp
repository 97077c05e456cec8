#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "clustermorph/error.hpp"
#include "clustermorph/synth.hpp"
#include "json.hpp"

namespace clustermorph {

namespace {

constexpr double kPi = std::numbers::pi;

double round4(double v) { return std::round(v * 1e4) / 1e4; }

// Berry envelope: centre, half-width at the top and the layout profile.
struct Envelope {
  Layout layout;
  Point center;
  double w0 = 0.0;
  double half_height = 0.0;
  Point wing_center;
  double wing_radius = 0.0;

  double top() const { return center.y - half_height; }

  bool in_main(Point p) const {
    const double dy = p.y - center.y;
    if (std::abs(dy) > half_height) return false;
    const double t = (dy + half_height) / (2.0 * half_height);  // 0 at the top
    const double dx = std::abs(p.x - center.x);
    switch (layout) {
      case Layout::cylindrical: return dx <= w0;
      case Layout::conical:
      case Layout::winged: return dx <= w0 * (1.0 - 0.6 * t);
      case Layout::globular: {
        const double u = dx / w0;
        const double v = dy / half_height;
        return u * u + v * v <= 1.0;
      }
    }
    return false;
  }

  bool in_wing(Point p) const {
    if (wing_radius <= 0.0) return false;
    const Point d = p - wing_center;
    return d.x * d.x + d.y * d.y <= wing_radius * wing_radius;
  }
};

Envelope make_envelope(const SceneSpec& s, int main_count, int wing_count) {
  const double a = s.berry_radius_px * std::sqrt(0.5 * (s.min_aspect + s.max_aspect));
  const double needed = main_count * kPi * a * a / 0.45;
  Envelope e;
  e.layout = s.layout;
  e.center = {s.width / 2.0, s.height * 0.4};
  // Profile areas in units of w0^2 for a height of 3.6 w0 (globular 2.6 w0).
  double unit = 5.04;
  double aspect = 1.8;
  if (s.layout == Layout::cylindrical) unit = 7.2;
  if (s.layout == Layout::globular) {
    unit = kPi * 1.3;
    aspect = 1.3;
  }
  e.w0 = std::sqrt(needed / unit);
  e.half_height = aspect * e.w0;
  if (wing_count > 0) {
    e.wing_radius = std::sqrt(wing_count * a * a / 0.45);
    e.wing_center = {e.center.x + e.w0 * s.wing_offset + e.wing_radius,
                     e.top() + 0.35 * e.half_height + e.wing_radius};
  }
  return e;
}

BitGrid stamp(const SceneSpec& s) { return BitGrid(s.height, s.width); }

bool inside_canvas(const SceneSpec& s, Point p, double margin) {
  return p.x >= margin && p.y >= margin && p.x <= s.width - margin && p.y <= s.height - margin;
}

}  // namespace

void SceneSpec::validate() const {
  if (berry_count < 1) throw ConfigError("berry_count must be at least 1");
  if (!(berry_radius_px > 2.0)) throw ConfigError("berry_radius_px must exceed 2");
  if (!(radius_jitter_px >= 0.0 && berry_radius_px - radius_jitter_px > 2.0))
    throw ConfigError("radius_jitter_px must keep radii above 2 px");
  if (!(min_aspect >= 1.0 && max_aspect >= min_aspect))
    throw ConfigError("aspect range must satisfy 1 <= min_aspect <= max_aspect");
  if (!(wing_fraction >= 0.0 && wing_fraction <= 0.5))
    throw ConfigError("wing_fraction must be in [0, 0.5]");
  if (width < 16 || height < 16) throw ConfigError("canvas too small");
  if (decoys.union_masks < 0 || decoys.stains < 0 || decoys.rachis < 0 || decoys.clamp < 0 ||
      decoys.reference < 0)
    throw ConfigError("decoy counts must be non-negative");
  if (decoys.union_masks > berry_count / 2)
    throw ConfigError("each union mask needs its own pair of berries");
  if (decoys.reference > 1) throw ConfigError("at most one reference circle");
  if (decoys.reference && !(reference_diameter_px > 4.0))
    throw ConfigError("reference_diameter_px must exceed 4");
}

void fill_ellipse(BitGrid& grid, Point c, double a, double b, double angle) {
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  const double ext = std::max(a, b) + 1.0;
  const int r0 = std::max(0, static_cast<int>(std::floor(c.y - ext)));
  const int r1 = std::min(grid.height() - 1, static_cast<int>(std::ceil(c.y + ext)));
  const int c0 = std::max(0, static_cast<int>(std::floor(c.x - ext)));
  const int c1 = std::min(grid.width() - 1, static_cast<int>(std::ceil(c.x + ext)));
  for (int col = c0; col <= c1; ++col)
    for (int row = r0; row <= r1; ++row) {
      const double dx = col + 0.5 - c.x;
      const double dy = row + 0.5 - c.y;
      const double u = (dx * ca + dy * sa) / a;
      const double v = (-dx * sa + dy * ca) / b;
      if (u * u + v * v <= 1.0) grid.set(row, col);
    }
}

void fill_stroke(BitGrid& grid, const std::vector<Point>& path, double hw) {
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const Point p = path[s];
    const Point q = path[s + 1];
    const Point pq = q - p;
    const double l2 = pq.x * pq.x + pq.y * pq.y;
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(p.y, q.y) - hw - 1)));
    const int r1 = std::min(grid.height() - 1, static_cast<int>(std::ceil(std::max(p.y, q.y) + hw + 1)));
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(p.x, q.x) - hw - 1)));
    const int c1 = std::min(grid.width() - 1, static_cast<int>(std::ceil(std::max(p.x, q.x) + hw + 1)));
    for (int col = c0; col <= c1; ++col)
      for (int row = r0; row <= r1; ++row) {
        const Point x{col + 0.5, row + 0.5};
        double u = l2 > 0 ? ((x.x - p.x) * pq.x + (x.y - p.y) * pq.y) / l2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        const Point d = x - (p + u * pq);
        if (d.x * d.x + d.y * d.y <= hw * hw) grid.set(row, col);
      }
  }
}

SynthScene gen_scene_2d(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int wing_count = spec.layout == Layout::winged
                             ? static_cast<int>(std::lround(spec.berry_count * spec.wing_fraction))
                             : 0;
  const int main_count = spec.berry_count - wing_count;
  const Envelope env = make_envelope(spec, main_count, wing_count);

  struct Item {
    BitGrid grid;
    Label label;
  };
  std::vector<Item> items;
  SynthScene scene;

  // Reference circle in the lower right corner, clear of the cluster.
  BBox reference_box;
  if (spec.decoys.reference) {
    const double rr = spec.reference_diameter_px / 2.0;
    const Point c{spec.width - rr - 24.0, spec.height - rr - 24.0};
    if (c.x - rr < 0 || c.y - rr < 0) throw GeometryError("canvas too small for the reference circle");
    BitGrid g = stamp(spec);
    fill_ellipse(g, c, rr, rr, 0.0);
    reference_box = g.bounding_box();
    items.push_back({std::move(g), Label::reference});
  }
  auto clear_of_reference = [&](Point p, double r) {
    if (reference_box.empty()) return true;
    return p.x + r < reference_box.x - 8 || p.y + r < reference_box.y - 8;
  };

  // Berries by dart throwing inside the envelope.
  std::vector<BerryTruth>& berries = scene.berries;
  const long budget = 4000L * spec.berry_count;
  long attempts = 0;
  for (int i = 0; i < spec.berry_count; ++i) {
    const bool on_wing = i >= main_count;
    const double r = rng.uniform(spec.berry_radius_px - spec.radius_jitter_px,
                                 spec.berry_radius_px + spec.radius_jitter_px);
    // Uniform in minor/major ratio, the quantity the first normalised
    // harmonic measures.
    const double asp = 1.0 / rng.uniform(1.0 / spec.max_aspect, 1.0 / spec.min_aspect);
    const double a = r * std::sqrt(asp);
    const double b = r / std::sqrt(asp);
    const double angle = rng.uniform(0.0, kPi);
    const double reach_x = on_wing ? env.wing_radius : env.w0;
    const double reach_y = on_wing ? env.wing_radius : env.half_height;
    const Point origin = on_wing ? env.wing_center : env.center;
    for (;;) {
      if (++attempts > budget) throw GeometryError("cannot pack berries: envelope too crowded");
      const Point p{origin.x + rng.uniform(-reach_x, reach_x), origin.y + rng.uniform(-reach_y, reach_y)};
      if (on_wing ? !env.in_wing(p) : !env.in_main(p)) continue;
      if (!inside_canvas(spec, p, a + 2.0) || !clear_of_reference(p, a)) continue;
      bool free = true;
      for (const auto& o : berries) {
        const Point d = p - o.center;
        const double min_d = 0.97 * (a + o.semi_major);
        if (d.x * d.x + d.y * d.y < min_d * min_d) {
          free = false;
          break;
        }
      }
      if (!free) continue;
      berries.push_back({p, a, b, angle, 0.0});
      break;
    }
  }
  std::vector<std::size_t> berry_item(berries.size());
  for (std::size_t i = 0; i < berries.size(); ++i) {
    BitGrid g = stamp(spec);
    fill_ellipse(g, berries[i].center, berries[i].semi_major, berries[i].semi_minor, berries[i].angle);
    berries[i].area_px = static_cast<double>(g.count());
    berry_item[i] = items.size();
    items.push_back({std::move(g), Label::berry});
  }

  // Union masks: a random unpaired berry joined with its nearest unpaired
  // neighbour.
  std::vector<char> paired(berries.size(), 0);
  for (int u = 0; u < spec.decoys.union_masks; ++u) {
    const auto n = static_cast<std::int64_t>(berries.size());
    std::size_t i = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    while (paired[i]) i = (i + 1) % berries.size();
    std::size_t j = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < berries.size(); ++k) {
      if (k == i || paired[k]) continue;
      const Point d = berries[i].center - berries[k].center;
      if (std::hypot(d.x, d.y) < best) {
        best = std::hypot(d.x, d.y);
        j = k;
      }
    }
    if (j == i) throw GeometryError("not enough berries for union masks");
    paired[i] = paired[j] = 1;
    BitGrid g = stamp(spec);
    for (std::size_t k : {i, j})
      fill_ellipse(g, berries[k].center, berries[k].semi_major, berries[k].semi_minor,
                   berries[k].angle);
    // Bridge any gap so the union is one region, as a merged detection is.
    fill_stroke(g, {berries[i].center, berries[j].center},
                0.5 * std::min(berries[i].semi_minor, berries[j].semi_minor));
    items.push_back({std::move(g), Label::union_mask});
  }

  // Rachis fragments just above the berries, clear of them.
  const double r_mean = spec.berry_radius_px;
  std::vector<BBox> taken;
  for (int k = 0; k < spec.decoys.rachis; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      const double seg = rng.uniform(1.6, 2.2) * r_mean;
      const double hw = rng.uniform(0.3, 0.4) * r_mean;
      const double base = rng.uniform(0.0, 2.0 * kPi);
      const double bend = rng.uniform(50.0, 70.0) * kPi / 180.0;
      const Point start{env.center.x + rng.uniform(-0.6, 0.6) * env.w0,
                        env.top() + rng.uniform(-0.2, 0.5) * env.half_height};
      std::vector<Point> path{start};
      for (int s = 0; s < 4; ++s) {
        const double dir = base + (s % 2 ? -bend : bend);
        path.push_back(path.back() + seg * Point{std::cos(dir), std::sin(dir)});
      }
      BitGrid g = stamp(spec);
      fill_stroke(g, path, hw);
      const BBox box = g.bounding_box();
      if (box.empty() || box.x < 2 || box.y < 2 || box.x + box.w > spec.width - 2 ||
          box.y + box.h > spec.height - 2)
        continue;
      const double area = static_cast<double>(g.count());
      std::size_t overlap = 0;
      for (std::size_t i = 0; i < berries.size(); ++i) overlap += intersection_count(g, items[berry_item[i]].grid);
      bool clash = false;
      for (const BBox& t : taken)
        clash |= box.x < t.x + t.w && t.x < box.x + box.w && box.y < t.y + t.h && t.y < box.y + box.h;
      if (clash || static_cast<double>(overlap) > 0.05 * area) continue;
      taken.push_back(box);
      items.push_back({std::move(g), Label::rachis});
      placed = true;
    }
    if (!placed) throw GeometryError("cannot place rachis fragment");
  }

  // Clamp: a long bar above the cluster top.
  for (int k = 0; k < spec.decoys.clamp; ++k) {
    const double len = 8.0 * r_mean;
    const double hw = 0.6 * r_mean;
    const double x = env.center.x + (k - 0.5 * (spec.decoys.clamp - 1)) * 3.0 * r_mean;
    double y1 = env.top() - 0.3 * env.half_height - 1.5 * r_mean;
    for (const BBox& t : taken) y1 = std::min(y1, t.y - hw - 4.0);
    const double y0 = y1 - len;
    if (y0 - hw < 2) throw GeometryError("canvas too small for the clamp");
    BitGrid g = stamp(spec);
    fill_stroke(g, {{x, y0}, {x, y1}}, hw);
    items.push_back({std::move(g), Label::clamp});
  }

  // Stains 4.5 to 6 cluster radii from the berry medoid.
  if (spec.decoys.stains > 0) {
    std::size_t medoid = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < berries.size(); ++i) {
      double sum = 0.0;
      for (const auto& o : berries) sum += std::hypot(berries[i].center.x - o.center.x, berries[i].center.y - o.center.y);
      if (sum < best) {
        best = sum;
        medoid = i;
      }
    }
    const Point m = berries[medoid].center;
    double ss = 0.0;
    for (const auto& o : berries) {
      const Point d = o.center - m;
      ss += d.x * d.x + d.y * d.y;
    }
    const double radius = std::max(std::sqrt(ss / static_cast<double>(berries.size())), 2.0 * r_mean);
    std::vector<Point> stains;
    for (int k = 0; k < spec.decoys.stains; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 5000 && !placed; ++attempt) {
        const double rs = rng.uniform(0.7, 1.1) * r_mean;
        const double asp = rng.uniform(1.0, 1.5);
        const double dir = rng.uniform(0.0, 2.0 * kPi);
        const double dist = rng.uniform(4.5, 6.0) * radius;
        const Point c = m + dist * Point{std::cos(dir), std::sin(dir)};
        const double a = rs * std::sqrt(asp);
        if (!inside_canvas(spec, c, a + 2.0) || !clear_of_reference(c, a)) continue;
        bool near = false;
        for (const Point& o : stains) near |= std::hypot(o.x - c.x, o.y - c.y) < 4.0 * a;
        for (const BBox& t : taken)
          near |= c.x + a > t.x && c.x - a < t.x + t.w && c.y + a > t.y && c.y - a < t.y + t.h;
        if (near) continue;
        BitGrid g = stamp(spec);
        fill_ellipse(g, c, a, rs / std::sqrt(asp), rng.uniform(0.0, kPi));
        stains.push_back(c);
        items.push_back({std::move(g), Label::stain});
        placed = true;
      }
      if (!placed) throw GeometryError("cannot place stain on the canvas");
    }
  }

  // Shuffle so file order carries no label information.
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);

  scene.file.image_id = spec.scene_id;
  scene.file.width = spec.width;
  scene.file.height = spec.height;
  for (std::size_t k = 0; k < order.size(); ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "m%03zu", k);
    const double iou = round4(rng.uniform(0.85, 1.0));
    const double stab = round4(rng.uniform(0.85, 1.0));
    const Item& it = items[order[k]];
    scene.file.masks.push_back(make_record(spec.scene_id + "_" + id, spec.scene_id, it.grid, iou, stab));
    scene.labels.push_back(it.label);
  }
  // truth follows file order too
  std::vector<std::size_t> berry_of(items.size(), berries.size());
  for (std::size_t i = 0; i < berries.size(); ++i) berry_of[berry_item[i]] = i;
  std::vector<BerryTruth> in_file_order;
  for (std::size_t k : order)
    if (berry_of[k] < berries.size()) in_file_order.push_back(berries[berry_of[k]]);
  berries = std::move(in_file_order);
  scene.true_count = static_cast<int>(berries.size());
  return scene;
}

std::string truth_json(const SynthScene& scene) {
  nlohmann::ordered_json j;
  j["scene_id"] = scene.file.image_id;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < scene.labels.size(); ++i)
    labels.push_back({{"id", scene.file.masks[i].id}, {"label", label_name(scene.labels[i])}});
  j["labels"] = std::move(labels);
  j["true_count"] = scene.true_count;
  j["per_angle_visible"] = nullptr;
  return j.dump(1) + "\n";
}

}  // namespace clustermorph
