// clustermorph: grape cluster morphometrics from instance-mask files.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/config.hpp"
#include "cli/pipeline.hpp"
#include "cli/plots.hpp"
#include "cli/report.hpp"
#include "cli/synth_cmd.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/filter.hpp"
#include "clustermorph/kernels.hpp"
#include "clustermorph/mask_file.hpp"

namespace cm = clustermorph;
namespace cli = clustermorph::cli;

int main(int argc, char** argv) {
  CLI::App app{"Grape cluster morphometrics from instance-mask files"};
  app.require_subcommand(1);
  bool scalar_only = false;
  app.add_flag("--scalar", scalar_only, "Disable the SIMD kernels");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Filter masks and compute berry and cluster descriptors");
  std::optional<std::string> config_path, metadata_path, out_dir, save_model;
  std::vector<std::string> inputs;
  std::optional<int> jobs;
  std::optional<double> concavity, mm_per_px;
  bool no_plots = false;
  pipe->add_option("inputs", inputs, "Mask files or folders of mask files");
  pipe->add_option("-c,--config", config_path, "Config file (key = value, schema_version = 1)")->check(CLI::ExistingFile);
  pipe->add_option("-m,--metadata", metadata_path, "Per-image metadata CSV")->check(CLI::ExistingFile);
  pipe->add_option("-o,--out", out_dir, "Output folder");
  pipe->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  pipe->add_option("--concavity", concavity, "Concave hull parameter in (0, 1]");
  pipe->add_option("--mm-per-px", mm_per_px, "Scale when no reference circle is used");
  pipe->add_option("--save-model", save_model, "Write the hull-shape PCA model as JSON");
  pipe->add_flag("--no-plots", no_plots, "Skip SVG plots");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate labelled synthetic mask scenes");
  std::optional<std::string> spec_path;
  std::string synth_out;
  std::optional<int> synth_count, synth_dim;
  std::optional<std::uint64_t> synth_seed;
  bool synth_meta = false;
  synth->add_option("-s,--spec", spec_path, "Scene spec file")->check(CLI::ExistingFile);
  synth->add_option("-o,--out", synth_out, "Output folder")->required();
  synth->add_option("-n,--count", synth_count, "Number of scenes");
  synth->add_option("--seed", synth_seed, "First seed");
  synth->add_option("-d,--dimension", synth_dim, "2 (flat scene) or 3 (sphere cluster, four views)");
  synth->add_flag("--metadata", synth_meta, "Also write metadata.csv");

  // plot
  auto* plot = app.add_subcommand("plot", "Redraw SVG plots from a results folder");
  std::string plot_results, plot_kind;
  std::optional<std::string> plot_out;
  plot->add_option("results", plot_results, "Results folder")->required()->check(CLI::ExistingDirectory);
  plot->add_option("-k,--kind", plot_kind, "ecdf, hulls, pca or angle")->required();
  plot->add_option("-o,--out", plot_out, "Output folder (default: <results>/plots)");

  // report
  auto* report = app.add_subcommand("report", "Summarise a results folder");
  std::string report_results;
  report->add_option("results", report_results, "Results folder")->required()->check(CLI::ExistingDirectory);

  // calibrate
  auto* calib = app.add_subcommand("calibrate", "Find the reference circle in one mask file");
  std::string calib_file;
  double ref_mm = 0.0, ref_min = 0.0, ref_max = 0.0;
  calib->add_option("masks", calib_file, "Mask file")->required()->check(CLI::ExistingFile);
  calib->add_option("--diameter-mm", ref_mm, "Reference diameter in mm")->required();
  calib->add_option("--min-px", ref_min, "Smallest plausible diameter in pixels")->required();
  calib->add_option("--max-px", ref_max, "Largest plausible diameter in pixels")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitUsage;
  }
  if (scalar_only) cm::kernels::set_isa(cm::kernels::Isa::scalar);

  try {
    if (*pipe) {
      cli::RunConfig cfg = config_path ? cli::load_run_config(*config_path) : cli::RunConfig{};
      if (!inputs.empty()) cfg.inputs.assign(inputs.begin(), inputs.end());
      if (metadata_path) cfg.metadata = *metadata_path;
      if (out_dir) cfg.output_dir = *out_dir;
      if (jobs) cfg.jobs = *jobs;
      if (concavity) cfg.architecture.concavity = *concavity;
      if (mm_per_px) cfg.mm_per_px = *mm_per_px;
      if (save_model) cfg.save_model = *save_model;
      if (no_plots) cfg.plots = false;
      if (cfg.inputs.empty()) {
        std::cerr << "pipeline: no inputs given\n";
        return cli::kExitUsage;
      }
      cfg.validate();
      const cli::RunManifest run = cli::cmd_pipeline(cfg);
      std::cerr << run.images.size() << " images: ok " << run.count(cli::ImageStatus::ok) << ", warning "
                << run.count(cli::ImageStatus::warning) << ", error " << run.count(cli::ImageStatus::error)
                << "; results in " << cfg.output_dir.string() << "\n";
      for (const auto& img : run.images)
        if (img.status == cli::ImageStatus::error)
          std::cerr << "  " << img.path.string() << ": " << img.message << "\n";
      return run.exit_code();
    }
    if (*synth) {
      cli::SynthJob job = spec_path ? cli::load_synth_spec(*spec_path) : cli::SynthJob{};
      if (synth_count) job.count = *synth_count;
      if (synth_seed) job.seed = *synth_seed;
      if (synth_dim) job.dimension = *synth_dim;
      if (synth_meta) job.metadata = true;
      const auto files = cli::cmd_synth(job, synth_out);
      std::cerr << "wrote " << files.size() << " files to " << synth_out << "\n";
      return cli::kExitOk;
    }
    if (*plot) {
      const cli::PlotKind kind = cli::parse_plot_kind(plot_kind);
      const auto files = cli::cmd_plot(plot_results, kind,
                                       plot_out ? std::filesystem::path(*plot_out)
                                                : std::filesystem::path(plot_results) / "plots");
      for (const auto& f : files) std::cout << f.string() << "\n";
      return cli::kExitOk;
    }
    if (*report) {
      std::cout << cli::cmd_report(report_results);
      return cli::kExitOk;
    }
    if (*calib) {
      const cm::MaskFile file = cm::load_mask_file(calib_file);
      const cm::ScaleCalibration c = cm::detect_reference(file.masks, {ref_mm, ref_min, ref_max});
      nlohmann::ordered_json j;
      j["image_id"] = file.image_id;
      j["reference_mask_id"] = c.reference_mask_id;
      j["diameter_px"] = c.diameter_px;
      j["circularity"] = c.circularity;
      j["mm_per_px"] = c.mm_per_px;
      std::cout << j.dump(2) << "\n";
      return cli::kExitOk;
    }
  } catch (const cm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitData;
  }
  return cli::kExitUsage;
}
