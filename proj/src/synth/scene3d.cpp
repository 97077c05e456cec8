#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "clustermorph/error.hpp"
#include "clustermorph/kernels.hpp"
#include "clustermorph/synth.hpp"
#include "json.hpp"

namespace clustermorph {

namespace {

constexpr double kPi = std::numbers::pi;

double profile(Layout layout, double t) {
  switch (layout) {
    case Layout::conical: return 1.0 - 0.55 * t;
    case Layout::globular: return 0.6 + 0.4 * std::sin(kPi * t);
    case Layout::cylindrical:
    case Layout::winged: return 1.0;
  }
  return 1.0;
}

double height_factor(Layout layout) {
  switch (layout) {
    case Layout::conical: return 1.8;
    case Layout::globular: return 1.3;
    default: return 2.0;
  }
}

// Ring radius at which m spheres of radius r_max sit with the given gap.
double ring_radius(int m, double r_max) {
  return 1.01 * r_max / std::sin(kPi / m);
}

struct Ring {
  double rho;
  int m;
};

// Concentric rings of one layer, outermost first. Ring sizes are multiples
// of four so that a ring maps onto itself under quarter turns. The axis is
// left to the rachis, and layers too narrow for a ring of four stay empty.
std::vector<Ring> layer_rings(double outer, double r_max) {
  std::vector<Ring> rings;
  double limit = outer;
  for (;;) {
    int m = 0;
    for (int cand = 4; ring_radius(cand, r_max) <= limit; cand += 4) m = cand;
    if (m == 0) break;
    const double rho = ring_radius(m, r_max);
    rings.push_back({rho, m});
    limit = rho - 2.05 * r_max;
  }
  return rings;
}

struct Plan {
  double r0 = 0.0;
  int layers = 0;
  int count = 0;
};

Plan plan_for(Layout layout, double r0, int layers, double r_max) {
  Plan p;
  p.r0 = r0;
  p.layers = layers;
  for (int k = 0; k < layers; ++k) {
    const double t = (k + 0.5) / layers;
    for (const Ring& ring : layer_rings(r0 * profile(layout, t) - r_max, r_max)) p.count += ring.m;
  }
  return p;
}

bool overlaps_any(const std::vector<Sphere>& s, const Sphere& c) {
  for (const Sphere& o : s) {
    const double dx = o.x - c.x, dy = o.y - c.y, dz = o.z - c.z;
    const double min_d = o.r + c.r;
    if (dx * dx + dy * dy + dz * dz < min_d * min_d) return true;
  }
  return false;
}

}  // namespace

void Scene3dSpec::validate() const {
  if (sphere_count < 1) throw ConfigError("sphere_count must be at least 1");
  if (!(radius_mm > 0.0) || !(radius_jitter_mm >= 0.0) || radius_jitter_mm >= radius_mm)
    throw ConfigError("sphere radius must be positive and exceed its jitter");
  if (!(px_per_mm > 0.0)) throw ConfigError("px_per_mm must be positive");
  if (!(visibility_threshold > 0.0 && visibility_threshold <= 1.0))
    throw ConfigError("visibility_threshold must be in (0, 1]");
  if (wing_rings < 0) throw ConfigError("wing_rings must be non-negative");
}

Scene3d gen_scene_3d(const Scene3dSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double r_max = spec.radius_mm + spec.radius_jitter_mm;
  const bool winged = spec.layout == Layout::winged;
  // The wing carries about a fifth of the berries unless set explicitly.
  const int wing_rings =
      !winged ? 0
              : spec.wing_rings > 0 ? spec.wing_rings
                                    : std::max(2, static_cast<int>(std::lround(spec.sphere_count * 0.2 / 2.0)));
  const int main_target = std::max(1, spec.sphere_count - 2 * wing_rings);

  // Match the sphere count first and the layout's height-to-width ratio
  // second. The widest layer holds at least a ring of eight; thinner
  // clusters show too much of their back.
  Plan best;
  double best_score = std::numeric_limits<double>::infinity();
  const double dy = 2.02 * r_max;
  for (double r0 = r_max + ring_radius(8, r_max); r0 <= 20.0 * r_max; r0 += 0.05 * r_max) {
    const double ideal = height_factor(spec.layout) * 2.0 * r0 / dy;
    const int lo = std::max(1, static_cast<int>(0.5 * ideal));
    const int hi = std::max(lo, static_cast<int>(std::ceil(1.5 * ideal)));
    for (int layers = lo; layers <= hi; ++layers) {
      const Plan p = plan_for(spec.layout, r0, layers, r_max);
      const double score = std::abs(p.count - main_target) + 0.5 * std::abs(layers - ideal);
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    }
  }
  Scene3d scene;
  scene.scene_id = spec.scene_id;
  scene.px_per_mm = spec.px_per_mm;
  scene.visibility_threshold = spec.visibility_threshold;
  for (int k = 0; k < best.layers; ++k) {
    const double t = (k + 0.5) / best.layers;
    const double y = k * dy;
    for (const Ring& ring : layer_rings(best.r0 * profile(spec.layout, t) - r_max, r_max)) {
      // Small rings sit with each back sphere straight behind a front one in
      // all four views; larger rings get a random phase.
      const double phase = ring.m <= 8 ? kPi / ring.m : rng.uniform(0.0, 2.0 * kPi);
      for (int i = 0; i < ring.m; ++i) {
        const double a = phase + 2.0 * kPi * i / ring.m;
        const double r = rng.uniform(spec.radius_mm - spec.radius_jitter_mm,
                                     spec.radius_mm + spec.radius_jitter_mm);
        scene.spheres.push_back({ring.rho * std::cos(a), y, ring.rho * std::sin(a), r, false});
      }
    }
  }

  if (wing_rings > 0) {
    // A two-sphere-high arm along +z from the upper third: seen end-on at 0
    // and 180 degrees and lengthwise at 90 and 270.
    const int layer = best.layers / 3;
    const double y = layer * dy;
    double z = 0.0;
    auto clear_at = [&](double zz) {
      for (int i = 0; i < 2; ++i)
        if (overlaps_any(scene.spheres, {0.0, y + (i - 0.5) * dy, zz, r_max, true})) return false;
      return true;
    };
    auto arm_clear = [&](double z0) {
      for (int ring = 0; ring < wing_rings; ++ring)
        if (!clear_at(z0 + ring * dy)) return false;
      return true;
    };
    // start at the surface so the arm does not thread through a hollow core
    for (const Sphere& o : scene.spheres)
      if (std::abs(o.y - y) < dy) z = std::max(z, std::hypot(o.x, o.z));
    while (!arm_clear(z)) z += 0.05 * r_max;
    for (int ring = 0; ring < wing_rings; ++ring)
      for (int i = 0; i < 2; ++i) {
        const double r = rng.uniform(spec.radius_mm - spec.radius_jitter_mm,
                                     spec.radius_mm + spec.radius_jitter_mm);
        scene.spheres.push_back({0.0, y + (i - 0.5) * dy, z + ring * dy, r, true});
      }
  }
  if (scene.spheres.empty()) throw GeometryError("sphere packing produced no spheres");
  return scene;
}

Projection project_visibility(const Scene3d& scene, int angle, bool with_masks) {
  if (angle != 0 && angle != 90 && angle != 180 && angle != 270)
    throw GeometryError("angle must be 0, 90, 180 or 270");
  const double th = angle * kPi / 180.0;
  const double c = std::cos(th);
  const double s = std::sin(th);
  const double px = scene.px_per_mm;

  // A canvas that does not depend on the angle.
  double reach = 0.0, ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const Sphere& sp : scene.spheres) {
    reach = std::max(reach, std::hypot(sp.x, sp.z) + sp.r);
    ymin = std::min(ymin, sp.y - sp.r);
    ymax = std::max(ymax, sp.y + sp.r);
  }
  const int width = static_cast<int>(std::ceil(2.0 * reach * px)) + 8;
  const int height = static_cast<int>(std::ceil((ymax - ymin) * px)) + 8;
  const double u_off = width / 2.0;
  const double v_off = 4.0 - ymin * px;

  const std::size_t n = scene.spheres.size();
  std::vector<float> depth(static_cast<std::size_t>(width) * height,
                           -std::numeric_limits<float>::infinity());
  std::vector<std::int32_t> owner(depth.size(), -1);
  std::vector<double> disk(n, 0.0);
  struct Disk {
    double cu, cv, rp;
    int r0, r1, c0, c1;
  };
  std::vector<Disk> disks(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sphere& sp = scene.spheres[i];
    // Rotating the camera by +angle maps the scene by -angle about y.
    const double u = sp.x * c - sp.z * s;
    const double d = sp.x * s + sp.z * c;
    Disk& k = disks[i];
    k.cu = u * px + u_off;
    k.cv = sp.y * px + v_off;
    k.rp = sp.r * px;
    k.r0 = std::max(0, static_cast<int>(std::floor(k.cv - k.rp)));
    k.r1 = std::min(height - 1, static_cast<int>(std::ceil(k.cv + k.rp)));
    k.c0 = std::max(0, static_cast<int>(std::floor(k.cu - k.rp)));
    k.c1 = std::min(width - 1, static_cast<int>(std::ceil(k.cu + k.rp)));
    const float r2 = static_cast<float>(k.rp * k.rp);
    for (int row = k.r0; row <= k.r1; ++row) {
      const float dyv = static_cast<float>(row + 0.5 - k.cv);
      const float dy2 = dyv * dyv;
      if (dy2 > r2) continue;
      const std::size_t base = static_cast<std::size_t>(row) * width + k.c0;
      const std::size_t len = static_cast<std::size_t>(k.c1 - k.c0 + 1);
      kernels::zbuffer_sphere_row(std::span<float>(depth).subspan(base, len),
                                  std::span<std::int32_t>(owner).subspan(base, len),
                                  static_cast<float>(k.c0 + 0.5), 1.0f, static_cast<float>(k.cu),
                                  dy2, r2, static_cast<float>(d * px), static_cast<std::int32_t>(i));
      for (int col = k.c0; col <= k.c1; ++col) {
        const float dx = static_cast<float>(col + 0.5 - k.cu);
        if ((r2 - dx * dx) - dy2 >= 0.0f) disk[i] += 1.0;
      }
    }
  }

  Projection out;
  out.angle = angle;
  out.visible_fraction.assign(n, 0.0);
  std::vector<double> owned(n, 0.0);
  for (std::int32_t o : owner)
    if (o >= 0) owned[static_cast<std::size_t>(o)] += 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.visible_fraction[i] = disk[i] > 0 ? owned[i] / disk[i] : 0.0;
    if (disk[i] > 0 && out.visible_fraction[i] >= scene.visibility_threshold) out.visible.push_back(i);
  }

  if (with_masks) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_a%03d", angle);
    out.masks.image_id = scene.scene_id + suffix;
    out.masks.width = width;
    out.masks.height = height;
    for (std::size_t i : out.visible) {
      BitGrid g(height, width);
      const Disk& k = disks[i];
      for (int row = k.r0; row <= k.r1; ++row)
        for (int col = k.c0; col <= k.c1; ++col)
          if (owner[static_cast<std::size_t>(row) * width + col] == static_cast<std::int32_t>(i))
            g.set(row, col);
      char id[24];
      std::snprintf(id, sizeof id, "_s%03zu", i);
      out.masks.masks.push_back(make_record(out.masks.image_id + id, out.masks.image_id, g));
    }
  }
  return out;
}

std::string truth_json(const Scene3d& scene, const std::vector<Projection>& views) {
  nlohmann::ordered_json j;
  j["scene_id"] = scene.scene_id;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const Projection& v : views)
    for (const MaskRecord& m : v.masks.masks) labels.push_back({{"id", m.id}, {"label", "berry"}});
  j["labels"] = std::move(labels);
  j["true_count"] = scene.true_count();
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const Projection& v : views) per[std::to_string(v.angle)] = v.visible.size();
  j["per_angle_visible"] = std::move(per);
  return j.dump(1) + "\n";
}

}  // namespace clustermorph
