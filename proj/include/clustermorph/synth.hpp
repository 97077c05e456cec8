#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "clustermorph/bitgrid.hpp"
#include "clustermorph/geometry.hpp"
#include "clustermorph/mask_file.hpp"

namespace clustermorph {

/// Seeded generator whose output is identical on every platform: the
/// engine's sequence is fixed by the standard and the distributions here
/// are implemented locally.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

enum class Layout { cylindrical, conical, globular, winged };

std::string_view layout_name(Layout layout) noexcept;
/// Throws ConfigError for an unknown name.
Layout parse_layout(std::string_view name);

struct DecoyCounts {
  int union_masks = 3;
  int stains = 2;
  int rachis = 2;
  int clamp = 1;
  int reference = 1;
};

struct SceneSpec {
  std::string scene_id = "scene";
  int berry_count = 60;
  double berry_radius_px = 14.0;
  double radius_jitter_px = 2.0;  ///< radii are uniform on mean +- jitter
  double min_aspect = 1.0;
  double max_aspect = 1.3;
  Layout layout = Layout::conical;
  double wing_offset = 0.9;    ///< wing centre offset in envelope half-widths
  double wing_fraction = 0.25;  ///< share of berries placed on the wing
  DecoyCounts decoys;
  double reference_diameter_px = 200.0;
  int width = 1600;
  int height = 2000;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
};

enum class Label { berry, union_mask, stain, rachis, clamp, reference };

std::string_view label_name(Label label) noexcept;

struct BerryTruth {
  Point center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;
  double area_px = 0.0;  ///< rasterised pixel count
};

struct SynthScene {
  MaskFile file;
  std::vector<Label> labels;  ///< parallel to file.masks
  int true_count = 0;
  std::vector<BerryTruth> berries;  ///< in the order of the berry masks in file
};

/// Throws ConfigError for an invalid spec and GeometryError when the berries
/// or decoys cannot be placed on the canvas.
SynthScene gen_scene_2d(const SceneSpec& spec);

/// Sidecar {scene_id, labels, true_count, per_angle_visible}.
std::string truth_json(const SynthScene& scene);

/// Rasterise pixels whose centres fall inside the ellipse.
void fill_ellipse(BitGrid& grid, Point center, double semi_major, double semi_minor,
                  double angle);
/// Thick polyline: pixels within `half_width` of any segment.
void fill_stroke(BitGrid& grid, const std::vector<Point>& path, double half_width);

struct Sphere {
  double x = 0.0;
  double y = 0.0;  ///< vertical, growing downwards
  double z = 0.0;
  double r = 0.0;
  bool wing = false;
};

struct Scene3dSpec {
  std::string scene_id = "cluster";
  int sphere_count = 60;  ///< target; the packing decides the exact number
  double radius_mm = 6.0;
  double radius_jitter_mm = 0.3;
  Layout layout = Layout::cylindrical;  ///< winged adds a branch to a cylinder
  int wing_rings = 0;  ///< sphere pairs along the wing; 0 = about a fifth of the spheres
  double px_per_mm = 2.0;
  double visibility_threshold = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Scene3d {
  std::string scene_id;
  std::vector<Sphere> spheres;
  double px_per_mm = 2.0;
  double visibility_threshold = 0.3;

  int true_count() const noexcept { return static_cast<int>(spheres.size()); }
};

/// Throws GeometryError when the packing yields no spheres.
Scene3d gen_scene_3d(const Scene3dSpec& spec);

struct Projection {
  int angle = 0;
  std::vector<double> visible_fraction;  ///< per sphere
  std::vector<std::size_t> visible;      ///< spheres at or above the threshold
  MaskFile masks;                        ///< one mask per visible sphere
};

/// Orthographic view from `angle` degrees (0, 90, 180 or 270) about the
/// vertical axis. At 0 degrees the camera looks along -z. A sphere counts as
/// visible when at least the threshold share of its projected disk is
/// unoccluded; its mask is that unoccluded part.
Projection project_visibility(const Scene3d& scene, int angle, bool with_masks = true);

/// Sidecar for a 3D scene: labels per angle file, sphere count and visible
/// counts per angle.
std::string truth_json(const Scene3d& scene, const std::vector<Projection>& views);

}  // namespace clustermorph
