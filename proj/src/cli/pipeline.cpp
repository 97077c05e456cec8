#include "cli/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <json.hpp>

#include "cli/plots.hpp"
#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/mask_file.hpp"

namespace clustermorph::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string line;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) line += ',';
    line += f;
    first = false;
  }
  line += '\n';
  return line;
}

std::string num(double v) { return csv_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string txt(const std::string& s) { return csv_field(s); }

double mean_of(const std::vector<BerryFeature>& b, double ShapeMetrics::*field) {
  if (b.empty()) return kNaN;
  double s = 0.0;
  for (const auto& f : b) s += f.metrics.*field;
  return s / static_cast<double>(b.size());
}

json contour_json(const Contour& c) {
  json a = json::array();
  for (const Point& p : c.points()) {
    a.push_back(p.x);
    a.push_back(p.y);
  }
  return a;
}

Contour contour_from(const json& a) {
  if (!a.is_array() || a.size() % 2 != 0) throw ParseError("contour must be a flat [x, y, ...] array");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < a.size(); i += 2) pts.push_back({a[i].get<double>(), a[i + 1].get<double>()});
  return Contour(std::move(pts));
}

TraitRow trait_row(const ImageResult& img) {
  TraitRow row;
  if (img.meta && img.meta->has_key) {
    row.key = img.meta->key;
  } else {
    row.key.genotype = img.image_id;
  }
  auto set = [&](std::string_view name, double v) { row.values[trait_index(name)] = v; };
  set("berry_count", static_cast<double>(img.berries.size()));
  set("berry_area", mean_of(img.berries, &ShapeMetrics::area));
  set("berry_length", mean_of(img.berries, &ShapeMetrics::length));
  set("berry_width", mean_of(img.berries, &ShapeMetrics::width));
  if (const auto& a = img.architecture) {
    set("compactness", a->compactness);
    set("ecdf_x25", a->ecdf_x_desc.f25);
    set("ecdf_x50", a->ecdf_x_desc.f50);
    set("ecdf_x75", a->ecdf_x_desc.f75);
    set("ecdf_y25", a->ecdf_y_desc.f25);
    set("ecdf_y50", a->ecdf_y_desc.f50);
    set("ecdf_y75", a->ecdf_y_desc.f75);
    if (a->shape_pc_scores.size() > 0) set("hull_pc1", a->shape_pc_scores[0]);
    if (a->shape_pc_scores.size() > 1) set("hull_pc2", a->shape_pc_scores[1]);
    set("cluster_length", a->metrics.length);
    set("cluster_width", a->metrics.width);
    set("cluster_perimeter", a->metrics.perimeter);
    set("cluster_aspect", a->metrics.aspect);
    set("cluster_area", a->metrics.area);
  }
  return row;
}

void population_steps(RunManifest& run, const RunConfig& cfg) {
  auto& pop = run.population;
  std::vector<std::size_t> with_arch;
  for (std::size_t i = 0; i < run.images.size(); ++i)
    if (run.images[i].architecture) with_arch.push_back(i);

  if (with_arch.size() < 3) {
    pop.warnings.push_back("population steps skipped: fewer than 3 clusters have an architecture");
  } else {
    std::vector<HullPolygon> hulls;
    for (std::size_t i : with_arch) hulls.push_back(run.images[i].architecture->hull);
    try {
      HullShapeModel hm = hull_shape_pca(hulls, cfg.hull_harmonics);
      for (const auto& w : hm.warnings) pop.warnings.push_back("hull shape: " + w);
      const Eigen::Index keep = std::min<Eigen::Index>(hm.scores.cols(), 5);
      for (std::size_t r = 0; r < hm.used.size(); ++r) {
        auto& scores = run.images[with_arch[hm.used[r]]].architecture->shape_pc_scores;
        scores.clear();
        for (Eigen::Index c = 0; c < keep; ++c) scores.push_back(hm.scores(static_cast<Eigen::Index>(r), c));
      }
      pop.hull_model = std::move(hm.model);
    } catch (const Error& e) {
      pop.warnings.push_back(std::string("hull shape PCA skipped: ") + e.what());
    }
  }

  // count correction, trained on the best view of every cluster with a known truth
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < run.images.size(); ++i)
    if (run.images[i].status != ImageStatus::error) groups[cluster_group(run.images[i])].push_back(i);
  std::vector<double> best, truth;
  for (const auto& [name, members] : groups) {
    std::optional<double> t;
    AngleSeries series;
    series.cluster_id = name;
    for (std::size_t i : members) {
      const auto& img = run.images[i];
      if (img.meta && img.meta->true_count) t = img.meta->true_count;
      series.views.push_back({img.meta ? img.meta->key.angle : 0, static_cast<double>(img.berries.size()), 0.0});
    }
    if (!t) continue;
    best.push_back(select_max_angle(series).count);
    truth.push_back(*t);
  }
  if (best.size() >= 3) {
    try {
      pop.count_fit = ols_fit(best, truth);
      for (auto& img : run.images)
        if (img.architecture)
          img.architecture->corrected_count = correct_count(*pop.count_fit, img.architecture->berry_count);
    } catch (const StatsError& e) {
      pop.warnings.push_back(std::string("count correction skipped: ") + e.what());
    }
  }

  for (const auto& img : run.images) {
    if (img.status == ImageStatus::error) continue;
    try {
      pop.traits.add(trait_row(img));
    } catch (const StatsError& e) {
      pop.warnings.push_back(img.image_id + ": " + e.what());
    }
  }
  if (!pop.traits.empty()) {
    try {
      pop.summary = trait_summary(pop.traits, cfg.block_adjusted);
      for (const auto& w : pop.summary->warnings) pop.warnings.push_back(w);
    } catch (const StatsError& e) {
      pop.warnings.push_back(std::string("trait summary skipped: ") + e.what());
    }
  }
}

std::string berries_csv(const RunManifest& run) {
  std::string out = csv_row({"image_id", "mask_id", "area_mm2", "perimeter_mm", "length_mm", "width_mm",
                             "aspect", "centroid_x_px", "centroid_y_px", "area_px", "red", "green", "blue"});
  for (const auto& img : run.images) {
    for (const auto& b : img.berries) {
      const double s = img.mm_per_px;
      out += csv_row({txt(img.image_id), txt(b.mask_id), num(b.metrics.area), num(b.metrics.perimeter),
                      num(b.metrics.length), num(b.metrics.width), num(b.metrics.aspect_ratio),
                      num(b.metrics.centroid.x / s), num(b.metrics.centroid.y / s), num(b.area_px),
                      num(b.colour ? b.colour->r : kNaN), num(b.colour ? b.colour->g : kNaN),
                      num(b.colour ? b.colour->b : kNaN)});
    }
  }
  return out;
}

std::string dispositions_csv(const RunManifest& run) {
  std::string out = csv_row({"image_id", "mask_id", "stage", "reason"});
  for (const auto& img : run.images)
    for (const auto& d : img.report.dispositions)
      out += csv_row({txt(img.image_id), txt(d.id), std::string(stage_name(d.stage)), txt(d.reason)});
  return out;
}

std::string clusters_csv(const RunManifest& run) {
  std::string out = csv_row({"image_id", "genotype", "block", "vine", "cluster", "angle", "status",
                             "masks_in", "berry_count", "corrected_count", "true_count", "mm_per_px",
                             "compactness", "length_mm", "width_mm", "perimeter_mm", "aspect", "area_mm2",
                             "ecdf_x25", "ecdf_x50", "ecdf_x75", "ecdf_y25", "ecdf_y50", "ecdf_y75",
                             "ecdf_x_class", "ecdf_y_class", "hull_pc1", "hull_pc2"});
  for (const auto& img : run.images) {
    const bool keyed = img.meta && img.meta->has_key;
    const TraitKey key = keyed ? img.meta->key : TraitKey{};
    const auto& a = img.architecture;
    auto pc = [&](std::size_t k) { return a && a->shape_pc_scores.size() > k ? a->shape_pc_scores[k] : kNaN; };
    auto opt = [&](auto f) { return a ? num(f(*a)) : std::string(); };
    out += csv_row({
        txt(img.image_id), txt(key.genotype), txt(key.block), txt(key.vine), txt(key.cluster),
        img.meta ? std::to_string(img.meta->key.angle) : std::string(),
        std::string(status_name(img.status)), num(img.masks_in),
        img.status == ImageStatus::error ? std::string() : num(img.berries.size()),
        a && a->corrected_count ? num(*a->corrected_count) : std::string(),
        img.meta && img.meta->true_count ? num(*img.meta->true_count) : std::string(),
        img.status == ImageStatus::error ? std::string() : num(img.mm_per_px),
        opt([](const ClusterArchitecture& c) { return c.compactness; }),
        opt([](const ClusterArchitecture& c) { return c.metrics.length; }),
        opt([](const ClusterArchitecture& c) { return c.metrics.width; }),
        opt([](const ClusterArchitecture& c) { return c.metrics.perimeter; }),
        opt([](const ClusterArchitecture& c) { return c.metrics.aspect; }),
        opt([](const ClusterArchitecture& c) { return c.metrics.area; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_x_desc.f25; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_x_desc.f50; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_x_desc.f75; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_y_desc.f25; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_y_desc.f50; }),
        opt([](const ClusterArchitecture& c) { return c.ecdf_y_desc.f75; }),
        a ? std::string(ecdf_class_name(classify_ecdf(a->ecdf_x_desc))) : std::string(),
        a ? std::string(ecdf_class_name(classify_ecdf(a->ecdf_y_desc))) : std::string(),
        num(pc(0)), num(pc(1))});
  }
  return out;
}

std::string correlations_csv(const TraitSummary& s) {
  std::string out = "trait";
  for (auto name : kTraitNames) out += "," + std::string(name);
  out += '\n';
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    out += std::string(kTraitNames[i]);
    for (std::size_t j = 0; j < kTraitCount; ++j)
      out += "," + num(s.correlation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out += '\n';
  }
  return out;
}

std::string repeatability_csv(const TraitSummary& s) {
  std::string out = csv_row({"trait", "n_groups", "n0", "var_g", "var_e", "repeatability", "ms_between",
                             "ms_within", "df_between", "df_within"});
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    const auto& r = s.repeatability[i];
    if (!r) {
      out += std::string(kTraitNames[i]) + ",,,,,,,,,\n";
      continue;
    }
    out += csv_row({std::string(kTraitNames[i]), num(r->n_groups), num(r->n_per_group_effective), num(r->var_g),
                    num(r->var_e), num(r->repeatability), num(r->ms_between), num(r->ms_within),
                    num(r->df_between), num(r->df_within)});
  }
  return out;
}

std::string genotypes_csv(const TraitSummary& s) {
  std::string out = csv_row({"trait", "rank", "genotype", "n", "mean", "sd", "min", "median", "max"});
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    std::size_t rank = 1;
    for (const auto& g : s.genotypes[i])
      out += csv_row({std::string(kTraitNames[i]), num(rank++), txt(g.genotype), num(g.n), num(g.mean), num(g.sd),
                      num(g.min), num(g.median), num(g.max)});
  }
  return out;
}

}  // namespace

std::string_view status_name(ImageStatus s) noexcept {
  switch (s) {
    case ImageStatus::ok: return "ok";
    case ImageStatus::warning: return "warning";
    case ImageStatus::error: return "error";
  }
  return "?";
}

std::size_t RunManifest::count(ImageStatus s) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(images.begin(), images.end(), [s](const ImageResult& r) { return r.status == s; }));
}

int RunManifest::exit_code() const noexcept {
  const std::size_t errors = count(ImageStatus::error);
  if (images.empty() || errors == images.size()) return kExitData;
  return errors ? kExitPartial : kExitOk;
}

std::string cluster_group(const ImageResult& image) {
  if (image.meta && image.meta->has_key) {
    const auto& k = image.meta->key;
    return k.genotype + "/" + k.block + "/" + k.vine + "/" + k.cluster;
  }
  return image.image_id;
}

std::string cluster_group(const ClusterRecord& r) {
  if (r.has_key) return r.key.genotype + "/" + r.key.block + "/" + r.key.vine + "/" + r.key.cluster;
  return r.image_id;
}

std::vector<fs::path> collect_inputs(std::span<const fs::path> inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(p)) {
      const std::string name = e.path().filename().string();
      if (!e.is_regular_file() || e.path().extension() != ".json") continue;
      if (name.ends_with(".truth.json")) continue;
      found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

ImageResult process_image(const fs::path& path, const RunConfig& cfg, const Metadata* metadata) {
  ImageResult res;
  res.path = path;
  res.mm_per_px = cfg.mm_per_px;
  try {
    auto t0 = Clock::now();
    MaskFile file = load_mask_file(path);
    res.image_id = file.image_id;
    res.masks_in = file.masks.size();
    if (metadata) {
      if (const ImageMeta* m = metadata->find(file.image_id)) {
        res.meta = *m;
      } else {
        res.warnings.push_back("no metadata row for image '" + file.image_id + "'");
      }
    }
    std::vector<MaskRecord> masks;
    if (res.meta && res.meta->roi) {
      for (auto& m : file.masks)
        if (inside_roi(*res.meta->roi, m.bbox)) masks.push_back(std::move(m));
      res.roi_dropped = res.masks_in - masks.size();
    } else {
      masks = std::move(file.masks);
    }
    res.seconds.load = since(t0);

    t0 = Clock::now();
    FilterOutcome fo = run_filter_pipeline(masks, cfg.filter, cfg.reference);
    res.report = std::move(fo.report);
    for (const auto& w : res.report.warnings) res.warnings.push_back(w);
    res.calibration = fo.calibration;
    if (res.calibration) res.mm_per_px = res.calibration->mm_per_px;
    res.seconds.filter = since(t0);

    t0 = Clock::now();
    std::optional<Raster> raster;
    if (res.meta && res.meta->raster) {
      try {
        raster = load_raster(*res.meta->raster);
      } catch (const Error& e) {
        res.warnings.push_back(std::string("no berry colours: ") + e.what());
      }
    }
    std::vector<double> areas;
    for (std::size_t i : fo.kept) {
      const PreparedMask& pm = fo.prepared[i];
      BerryFeature bf;
      bf.mask_id = masks[i].id;
      bf.metrics = shape_metrics(*pm.smooth, res.mm_per_px);
      bf.area_px = pm.area_px;
      if (raster) {
        try {
          bf.colour = median_color(*raster, pm.grid);
        } catch (const DimensionError& e) {
          res.warnings.push_back(std::string("no berry colours: ") + e.what());
          raster.reset();
        }
      }
      res.berries.push_back(std::move(bf));
      res.outlines.push_back(*pm.smooth);
      areas.push_back(pm.area_px);
    }
    res.seconds.features = since(t0);

    t0 = Clock::now();
    if (res.berries.size() < 2) {
      res.warnings.push_back(res.berries.empty() ? "no berries kept" : "one berry kept, no architecture");
    } else {
      try {
        res.architecture = analyze_cluster(res.outlines, areas, res.mm_per_px, cfg.architecture);
      } catch (const Error& e) {
        res.warnings.push_back(std::string("architecture skipped: ") + e.what());
      }
    }
    res.seconds.architecture = since(t0);
    res.status = res.warnings.empty() ? ImageStatus::ok : ImageStatus::warning;
  } catch (const std::exception& e) {
    res.status = ImageStatus::error;
    res.message = e.what();
    if (const auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->record() >= 0)
      res.message = "record " + std::to_string(pe->record()) + ": " + res.message;
    res.berries.clear();
    res.outlines.clear();
    res.architecture.reset();
  }
  if (res.image_id.empty()) res.image_id = path.stem().string();
  return res;
}

RunManifest run_batch(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  RunManifest run;
  run.config_text = canonical_config(cfg);
  run.config_hash = config_hash(cfg);

  std::optional<Metadata> metadata;
  if (cfg.metadata) metadata = Metadata::load(*cfg.metadata);
  const Metadata* md = metadata ? &*metadata : nullptr;

  const std::vector<fs::path> files = collect_inputs(cfg.inputs);
  run.images.resize(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) run.images[i] = process_image(files[i], cfg, md);
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), files.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (!run.images.empty()) population_steps(run, cfg);
  run.wall_seconds = since(t0);
  return run;
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string manifest_json(const RunManifest& run) {
  json m;
  m["schema_version"] = kConfigSchemaVersion;
  m["config_hash"] = hex64(run.config_hash);
  m["config"] = run.config_text;
  std::size_t in = 0, roi = 0, multi = 0, metric = 0, shape = 0, kept = 0;
  json images = json::array();
  for (const auto& img : run.images) {
    json e;
    e["path"] = img.path.generic_string();
    e["image_id"] = img.image_id;
    e["status"] = status_name(img.status);
    e["message"] = img.message;
    e["warnings"] = img.warnings;
    e["masks_in"] = img.masks_in;
    e["roi_dropped"] = img.roi_dropped;
    e["removed_multi"] = img.report.removed_multi;
    e["removed_metric"] = img.report.removed_metric;
    e["removed_efd_pca"] = img.report.removed_efd_pca;
    e["kept"] = img.report.kept;
    e["mm_per_px"] = img.mm_per_px;
    if (img.calibration) {
      e["reference"] = {{"mask_id", img.calibration->reference_mask_id},
                        {"diameter_px", img.calibration->diameter_px},
                        {"circularity", img.calibration->circularity}};
    }
    e["seconds"] = {{"load", img.seconds.load},
                    {"filter", img.seconds.filter},
                    {"features", img.seconds.features},
                    {"architecture", img.seconds.architecture}};
    images.push_back(std::move(e));
    in += img.masks_in;
    roi += img.roi_dropped;
    multi += img.report.removed_multi;
    metric += img.report.removed_metric;
    shape += img.report.removed_efd_pca;
    kept += img.report.kept;
  }
  m["totals"] = {{"images", run.images.size()},
                 {"ok", run.count(ImageStatus::ok)},
                 {"warning", run.count(ImageStatus::warning)},
                 {"error", run.count(ImageStatus::error)},
                 {"masks_in", in},
                 {"roi_dropped", roi},
                 {"removed_multi", multi},
                 {"removed_metric", metric},
                 {"removed_efd_pca", shape},
                 {"kept", kept}};
  json pop;
  pop["warnings"] = run.population.warnings;
  if (const auto& f = run.population.count_fit) {
    pop["count_fit"] = {{"beta0", f->beta0}, {"beta1", f->beta1}, {"r2", f->r2},
                        {"adj_r2", f->adj_r2}, {"residual_sd", f->residual_sd}, {"n", f->n}};
  }
  if (const auto& h = run.population.hull_model) {
    std::vector<double> ex(h->explained.data(), h->explained.data() + h->explained.size());
    pop["hull_pca_explained"] = ex;
  }
  m["population"] = pop;
  m["wall_seconds"] = run.wall_seconds;
  m["exit_code"] = run.exit_code();
  return m.dump(2) + "\n";
}

std::string clusters_json(const RunManifest& run) {
  json doc;
  std::vector<double> ex;
  if (const auto& h = run.population.hull_model) ex.assign(h->explained.data(), h->explained.data() + h->explained.size());
  doc["hull_pca_explained"] = ex;
  json list = json::array();
  for (const auto& img : run.images) {
    if (!img.architecture) continue;
    const auto& a = *img.architecture;
    json c;
    c["image_id"] = img.image_id;
    if (img.meta && img.meta->has_key) {
      const auto& k = img.meta->key;
      c["key"] = {{"genotype", k.genotype}, {"block", k.block}, {"vine", k.vine}, {"cluster", k.cluster},
                  {"angle", k.angle}};
    }
    c["berry_count"] = a.berry_count;
    if (a.corrected_count) c["corrected_count"] = *a.corrected_count;
    c["compactness"] = a.compactness;
    c["metrics_mm"] = {{"length", a.metrics.length}, {"width", a.metrics.width},
                       {"perimeter", a.metrics.perimeter}, {"aspect", a.metrics.aspect},
                       {"area", a.metrics.area}};
    c["ecdf_x"] = a.ecdf_x.values;
    c["ecdf_y"] = a.ecdf_y.values;
    c["pc_scores"] = a.shape_pc_scores;
    c["hull_concavity"] = a.hull.concavity;
    c["hull_px"] = contour_json(a.hull.polygon);
    json berries = json::array();
    for (const auto& o : img.outlines) berries.push_back(contour_json(o));
    c["berries_px"] = std::move(berries);
    list.push_back(std::move(c));
  }
  doc["clusters"] = std::move(list);
  return doc.dump() + "\n";
}

ClusterDocument parse_clusters_json(const std::string& text) {
  ClusterDocument doc;
  try {
    const json d = json::parse(text);
    doc.explained = d.at("hull_pca_explained").get<std::vector<double>>();
    for (const auto& c : d.at("clusters")) {
      ClusterRecord r;
      r.image_id = c.at("image_id").get<std::string>();
      if (c.contains("key")) {
        const auto& k = c["key"];
        r.has_key = true;
        r.key = {k.at("genotype").get<std::string>(), k.at("block").get<std::string>(),
                 k.at("vine").get<std::string>(), k.at("cluster").get<std::string>(), k.at("angle").get<int>()};
      }
      r.berry_count = c.at("berry_count").get<int>();
      r.ecdf_x.axis = Axis::x;
      r.ecdf_y.axis = Axis::y;
      r.ecdf_x.values = c.at("ecdf_x").get<std::array<double, 100>>();
      r.ecdf_y.values = c.at("ecdf_y").get<std::array<double, 100>>();
      r.pc_scores = c.at("pc_scores").get<std::vector<double>>();
      r.hull_concavity = c.at("hull_concavity").get<double>();
      r.hull = contour_from(c.at("hull_px"));
      for (const auto& b : c.at("berries_px")) r.berries.push_back(contour_from(b));
      doc.clusters.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("clusters.json: ") + e.what());
  } catch (const GeometryError& e) {
    throw ParseError(std::string("clusters.json: ") + e.what());
  }
  return doc;
}

void write_outputs(const RunManifest& run, const RunConfig& cfg) {
  const fs::path& dir = cfg.output_dir;
  fs::create_directories(dir);
  write_atomic(dir / "berries.csv", berries_csv(run));
  write_atomic(dir / "dispositions.csv", dispositions_csv(run));
  write_atomic(dir / "clusters.csv", clusters_csv(run));
  const std::string cj = clusters_json(run);
  write_atomic(dir / "clusters.json", cj);

  std::ostringstream traits;
  run.population.traits.write_csv(traits);
  write_atomic(dir / "traits.csv", traits.str());
  if (const auto& s = run.population.summary) {
    write_atomic(dir / "correlations.csv", correlations_csv(*s));
    write_atomic(dir / "repeatability.csv", repeatability_csv(*s));
    write_atomic(dir / "genotypes.csv", genotypes_csv(*s));
  }
  if (cfg.save_model && run.population.hull_model) write_atomic(*cfg.save_model, pca_to_json(*run.population.hull_model));

  if (cfg.plots) {
    const ClusterDocument doc = parse_clusters_json(cj);
    const fs::path plots = dir / "plots";
    fs::create_directories(plots);
    for (PlotKind k : {PlotKind::ecdf, PlotKind::hulls, PlotKind::pca, PlotKind::angle})
      for (const auto& [name, svg] : render_plots(doc, k)) write_atomic(plots / name, svg);
  }
  // last, so a manifest on disk means the tables are complete
  write_atomic(dir / "manifest.json", manifest_json(run));
}

RunManifest cmd_pipeline(const RunConfig& cfg) {
  RunManifest run = run_batch(cfg);
  write_outputs(run, cfg);
  return run;
}

}  // namespace clustermorph::cli
