#include "cli/synth_cmd.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/pipeline.hpp"
#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/mask_file.hpp"

namespace clustermorph::cli {
namespace {

constexpr std::string_view kSynthKeys[] = {
    "synth.dimension", "synth.count", "synth.seed", "synth.prefix", "synth.count_min", "synth.count_max",
    "synth.genotypes", "synth.metadata",
    "scene.berry_count", "scene.berry_radius_px", "scene.radius_jitter_px", "scene.min_aspect",
    "scene.max_aspect", "scene.layout", "scene.wing_offset", "scene.wing_fraction", "scene.union_masks",
    "scene.stains", "scene.rachis", "scene.clamp", "scene.reference", "scene.reference_diameter_px",
    "scene.width", "scene.height",
    "scene3d.sphere_count", "scene3d.radius_mm", "scene3d.radius_jitter_mm", "scene3d.layout",
    "scene3d.wing_rings", "scene3d.px_per_mm", "scene3d.visibility_threshold",
};

std::uint64_t as_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + t + "'");
  return v;
}

std::string scene_name(const SynthJob& job, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04llu", static_cast<unsigned long long>(job.seed + static_cast<std::uint64_t>(i)));
  return job.prefix + buf;
}

// count and layout draws come from their own stream so the scene itself
// sees the plain seed
Rng pick_stream(const SynthJob& job, int i) {
  return Rng((job.seed + static_cast<std::uint64_t>(i)) ^ 0x9e3779b97f4a7c15ull);
}

std::string genotype_of(const SynthJob& job, int i, const std::string& id) {
  if (job.genotypes <= 0) return id;
  char buf[16];
  std::snprintf(buf, sizeof buf, "g%02d", i % job.genotypes + 1);
  return buf;
}

}  // namespace

void SynthJob::validate() const {
  if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
  if (count < 1) throw ConfigError("count must be at least 1");
  if (count_min < 0 || count_max < count_min) throw ConfigError("count_min must not exceed count_max");
  if ((count_min == 0) != (count_max == 0)) throw ConfigError("set both count_min and count_max, or neither");
  if (genotypes < 0) throw ConfigError("genotypes must be non-negative");
  if (prefix.empty()) throw ConfigError("prefix must not be empty");
  if (dimension == 2) scene_spec(*this, 0).validate();
  else scene3d_spec(*this, 0).validate();
}

SynthJob parse_synth_spec(std::string_view text) {
  SynthJob job;
  for (const auto& [key, value] : read_key_values(text, kSynthKeys)) {
    if (key == "synth.dimension") job.dimension = as_int(key, value);
    else if (key == "synth.count") job.count = as_int(key, value);
    else if (key == "synth.seed") job.seed = as_u64(key, value);
    else if (key == "synth.prefix") job.prefix = trim(value);
    else if (key == "synth.count_min") job.count_min = as_int(key, value);
    else if (key == "synth.count_max") job.count_max = as_int(key, value);
    else if (key == "synth.genotypes") job.genotypes = as_int(key, value);
    else if (key == "synth.metadata") job.metadata = as_bool(key, value);
    else if (key == "scene.berry_count") job.scene.berry_count = as_int(key, value);
    else if (key == "scene.berry_radius_px") job.scene.berry_radius_px = as_double(key, value);
    else if (key == "scene.radius_jitter_px") job.scene.radius_jitter_px = as_double(key, value);
    else if (key == "scene.min_aspect") job.scene.min_aspect = as_double(key, value);
    else if (key == "scene.max_aspect") job.scene.max_aspect = as_double(key, value);
    else if (key == "scene.layout" || key == "scene3d.layout") {
      const std::string name = trim(value);
      if (name == "mixed") job.mixed_layout = true;
      else if (key == "scene.layout") job.scene.layout = parse_layout(name);
      else job.scene3d.layout = parse_layout(name);
    }
    else if (key == "scene.wing_offset") job.scene.wing_offset = as_double(key, value);
    else if (key == "scene.wing_fraction") job.scene.wing_fraction = as_double(key, value);
    else if (key == "scene.union_masks") job.scene.decoys.union_masks = as_int(key, value);
    else if (key == "scene.stains") job.scene.decoys.stains = as_int(key, value);
    else if (key == "scene.rachis") job.scene.decoys.rachis = as_int(key, value);
    else if (key == "scene.clamp") job.scene.decoys.clamp = as_int(key, value);
    else if (key == "scene.reference") job.scene.decoys.reference = as_int(key, value);
    else if (key == "scene.reference_diameter_px") job.scene.reference_diameter_px = as_double(key, value);
    else if (key == "scene.width") job.scene.width = as_int(key, value);
    else if (key == "scene.height") job.scene.height = as_int(key, value);
    else if (key == "scene3d.sphere_count") job.scene3d.sphere_count = as_int(key, value);
    else if (key == "scene3d.radius_mm") job.scene3d.radius_mm = as_double(key, value);
    else if (key == "scene3d.radius_jitter_mm") job.scene3d.radius_jitter_mm = as_double(key, value);
    else if (key == "scene3d.wing_rings") job.scene3d.wing_rings = as_int(key, value);
    else if (key == "scene3d.px_per_mm") job.scene3d.px_per_mm = as_double(key, value);
    else if (key == "scene3d.visibility_threshold") job.scene3d.visibility_threshold = as_double(key, value);
  }
  job.validate();
  return job;
}

SynthJob load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_synth_spec(ss.str());
}

SceneSpec scene_spec(const SynthJob& job, int i) {
  SceneSpec s = job.scene;
  s.scene_id = scene_name(job, i);
  s.seed = job.seed + static_cast<std::uint64_t>(i);
  Rng pick = pick_stream(job, i);
  if (job.count_max > 0) s.berry_count = static_cast<int>(pick.uniform_int(job.count_min, job.count_max));
  if (job.mixed_layout) s.layout = static_cast<Layout>(pick.uniform_int(0, 3));
  return s;
}

Scene3dSpec scene3d_spec(const SynthJob& job, int i) {
  Scene3dSpec s = job.scene3d;
  s.scene_id = scene_name(job, i);
  s.seed = job.seed + static_cast<std::uint64_t>(i);
  Rng pick = pick_stream(job, i);
  if (job.count_max > 0) s.sphere_count = static_cast<int>(pick.uniform_int(job.count_min, job.count_max));
  if (job.mixed_layout) s.layout = static_cast<Layout>(pick.uniform_int(0, 2));
  return s;
}

std::vector<std::filesystem::path> cmd_synth(const SynthJob& job, const std::filesystem::path& out_dir) {
  job.validate();
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    written.push_back(out_dir / name);
    write_atomic(written.back(), text);
  };
  std::string meta = "image_id,genotype,block,vine,cluster,angle,true_count\n";

  for (int i = 0; i < job.count; ++i) {
    if (job.dimension == 2) {
      const SynthScene scene = gen_scene_2d(scene_spec(job, i));
      const std::string& id = scene.file.image_id;
      emit(id + ".json", to_mask_json(scene.file));
      emit(id + ".truth.json", truth_json(scene));
      meta += csv_field(id) + "," + csv_field(genotype_of(job, i, id)) + ",1," + std::to_string(i + 1) + ",1,0," +
              std::to_string(scene.true_count) + "\n";
    } else {
      const Scene3d scene = gen_scene_3d(scene3d_spec(job, i));
      std::vector<Projection> views;
      for (int angle : {0, 90, 180, 270}) {
        views.push_back(project_visibility(scene, angle));
        const std::string& id = views.back().masks.image_id;
        emit(id + ".json", to_mask_json(views.back().masks));
        meta += csv_field(id) + "," + csv_field(genotype_of(job, i, scene.scene_id)) + ",1," +
                std::to_string(i + 1) + "," + csv_field(scene.scene_id) + "," + std::to_string(angle) + "," +
                std::to_string(scene.true_count()) + "\n";
      }
      emit(scene.scene_id + ".truth.json", truth_json(scene, views));
    }
  }
  if (job.metadata) emit("metadata.csv", meta);
  return written;
}

}  // namespace clustermorph::cli
