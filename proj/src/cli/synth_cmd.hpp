#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clustermorph/synth.hpp"

namespace clustermorph::cli {

/// A batch of synthetic scenes. Scene i uses seed + i; when count_min and
/// count_max are set the berry (sphere) count of each scene is drawn from
/// that range, and `mixed_layout` draws the layout too.
struct SynthJob {
  int dimension = 2;
  int count = 1;
  std::uint64_t seed = 1;
  std::string prefix = "scene";
  int count_min = 0;
  int count_max = 0;
  bool mixed_layout = false;
  int genotypes = 0;  ///< > 0: scenes assigned round robin to g01, g02, ...
  bool metadata = false;
  SceneSpec scene;
  Scene3dSpec scene3d;

  void validate() const;
};

/// Same key = value format as the run config: schema_version = 1 and the
/// sections [synth], [scene] (2D keys) and [scene3d].
SynthJob parse_synth_spec(std::string_view text);
SynthJob load_synth_spec(const std::filesystem::path& path);

/// Effective spec of scene i of the job.
SceneSpec scene_spec(const SynthJob& job, int i);
Scene3dSpec scene3d_spec(const SynthJob& job, int i);

/// Writes <id>.json + <id>.truth.json per 2D scene, or one mask file per
/// angle (<id>_a000.json ...) + <id>.truth.json per 3D scene, plus
/// metadata.csv when asked. Returns the files written in order.
std::vector<std::filesystem::path> cmd_synth(const SynthJob& job, const std::filesystem::path& out_dir);

}  // namespace clustermorph::cli
