#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cli/config.hpp"
#include "cli/metadata.hpp"
#include "clustermorph/architecture.hpp"
#include "clustermorph/filter.hpp"
#include "clustermorph/raster.hpp"
#include "clustermorph/stats.hpp"
#include "clustermorph/traits.hpp"

namespace clustermorph::cli {

enum class ImageStatus { ok, warning, error };

std::string_view status_name(ImageStatus s) noexcept;

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitPartial = 3;

struct StageTimes {
  double load = 0.0;
  double filter = 0.0;
  double features = 0.0;
  double architecture = 0.0;
};

struct BerryFeature {
  std::string mask_id;
  ShapeMetrics metrics;  ///< mm
  double area_px = 0.0;
  std::optional<Rgb> colour;
};

struct ImageResult {
  fs::path path;
  std::string image_id;
  ImageStatus status = ImageStatus::ok;
  std::string message;
  std::vector<std::string> warnings;
  std::size_t masks_in = 0;
  std::size_t roi_dropped = 0;
  FilterReport report;
  std::optional<ScaleCalibration> calibration;
  double mm_per_px = 1.0;
  std::vector<BerryFeature> berries;
  std::vector<Contour> outlines;  ///< corner-cut berry outlines in pixels
  std::optional<ClusterArchitecture> architecture;
  std::optional<ImageMeta> meta;
  StageTimes seconds;
};

/// Load, ROI crop, filter, per-berry features and cluster architecture for
/// one mask file. Never throws: failures land in status/message.
ImageResult process_image(const fs::path& path, const RunConfig& cfg, const Metadata* metadata);

struct PopulationResult {
  std::optional<PcaModel> hull_model;
  std::optional<RegressionFit> count_fit;
  TraitTable traits;
  std::optional<TraitSummary> summary;
  std::vector<std::string> warnings;
};

struct RunManifest {
  std::vector<ImageResult> images;  ///< input order
  PopulationResult population;
  std::uint64_t config_hash = 0;
  std::string config_text;
  double wall_seconds = 0.0;

  std::size_t count(ImageStatus s) const noexcept;
  /// 0 when every image was processed, 2 when there was nothing to process
  /// or every image failed, 3 when some failed.
  int exit_code() const noexcept;
};

/// Mask files named directly plus every *.json inside listed folders
/// (not recursive; *.truth.json sidecars skipped), sorted per folder.
std::vector<fs::path> collect_inputs(std::span<const fs::path> inputs);

/// Per-image work over a pool of cfg.jobs threads, then the population
/// steps. Writes nothing.
RunManifest run_batch(const RunConfig& cfg);

/// berries.csv, dispositions.csv, clusters.csv, clusters.json, traits.csv,
/// genotypes.csv, correlations.csv, repeatability.csv, manifest.json and
/// plots/*.svg, each written to a temporary name and renamed into place.
void write_outputs(const RunManifest& manifest, const RunConfig& cfg);

RunManifest cmd_pipeline(const RunConfig& cfg);

void write_atomic(const fs::path& path, std::string_view content);

std::string manifest_json(const RunManifest& manifest);

/// What the plotting commands need from one cluster view.
struct ClusterRecord {
  std::string image_id;
  bool has_key = false;
  TraitKey key;
  int berry_count = 0;
  EcdfProfile ecdf_x;
  EcdfProfile ecdf_y;
  Contour hull;
  double hull_concavity = 1.0;
  std::vector<Contour> berries;
  std::vector<double> pc_scores;
};

struct ClusterDocument {
  std::vector<double> explained;  ///< hull-shape PCA, may be empty
  std::vector<ClusterRecord> clusters;
};

std::string clusters_json(const RunManifest& manifest);
ClusterDocument parse_clusters_json(const std::string& text);

/// Group label used to tie the views of one physical cluster together.
std::string cluster_group(const ImageResult& image);
std::string cluster_group(const ClusterRecord& record);

}  // namespace clustermorph::cli
