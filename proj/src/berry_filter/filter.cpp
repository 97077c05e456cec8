#include "clustermorph/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "clustermorph/contour.hpp"
#include "clustermorph/efd.hpp"
#include "clustermorph/error.hpp"
#include "clustermorph/pca.hpp"
#include "clustermorph/rle.hpp"

namespace clustermorph {

void FilterConfig::validate() const {
  if (!(containment_threshold > 0.0 && containment_threshold <= 1.0))
    throw ConfigError("containment_threshold must be in (0, 1]");
  if (!(min_area_px >= 0.0 && min_area_px < max_area_px))
    throw ConfigError("min_area_px must be non-negative and below max_area_px");
  if (!(max_aspect >= 1.0)) throw ConfigError("max_aspect must be at least 1");
  if (!(max_centroid_distance > 0.0)) throw ConfigError("max_centroid_distance must be positive");
  if (pca_rounds < 1) throw ConfigError("pca_rounds must be at least 1");
  if (!(pca_sd > 0.0)) throw ConfigError("pca_sd must be positive");
  if (pca_components < 1) throw ConfigError("pca_components must be at least 1");
  if (harmonics < 1) throw ConfigError("harmonics must be at least 1");
  if (!(pca_min_explained >= 0.0 && pca_min_explained < 1.0))
    throw ConfigError("pca_min_explained must be in [0, 1)");
}

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::kept: return "kept";
    case Stage::multi_berry: return "multi_berry";
    case Stage::metric: return "metric";
    case Stage::efd_pca: return "efd_pca";
  }
  return "unknown";
}

PreparedMask prepare_mask(const MaskRecord& record) {
  PreparedMask out;
  out.grid = decode_rle(record.rle);
  out.area_px = static_cast<double>(out.grid.count());
  if (out.area_px > 0) {
    out.outline = extract_contour(out.grid);
    out.smooth = corner_cut(*out.outline);
    out.metrics = shape_metrics(*out.smooth);
  }
  return out;
}

MaskMeasure measure(const PreparedMask& mask) {
  return {mask.area_px, mask.metrics.aspect_ratio, mask.metrics.centroid};
}

namespace {

bool overlaps(const BBox& a, const BBox& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

std::size_t overlap_count(const BitGrid& a, const BBox& ba, const BitGrid& b, const BBox& bb) {
  if (!overlaps(ba, bb)) return 0;
  const int c0 = std::max(ba.x, bb.x);
  const int c1 = std::min(ba.x + ba.w, bb.x + bb.w);
  return intersection_count(a, b, c0, c1);
}

}  // namespace

Partition remove_multi_berry(std::span<const BitGrid> masks, const FilterConfig& cfg) {
  const std::size_t n = masks.size();
  std::vector<BBox> boxes(n);
  std::vector<std::size_t> areas(n);
  for (std::size_t i = 0; i < n; ++i) {
    boxes[i] = masks[i].bounding_box();
    areas[i] = masks[i].count();
    if (i > 0 && (masks[i].height() != masks[0].height() || masks[i].width() != masks[0].width()))
      throw DimensionError("masks of one image must share dimensions");
  }
  auto contains = [&](std::size_t big, std::size_t small) {
    if (areas[small] == 0) return false;
    const double inter = static_cast<double>(
        overlap_count(masks[big], boxes[big], masks[small], boxes[small]));
    return inter / static_cast<double>(areas[small]) >= cfg.containment_threshold;
  };

  Partition out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> inside;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || areas[j] == 0 || areas[j] >= areas[i]) continue;
      if (contains(i, j)) inside.push_back(j);
    }
    bool multi = false;
    for (std::size_t p = 0; p < inside.size() && !multi; ++p)
      for (std::size_t q = p + 1; q < inside.size() && !multi; ++q) {
        const std::size_t a = inside[p];
        const std::size_t b = inside[q];
        const bool nested = areas[a] >= areas[b] ? contains(a, b) : contains(b, a);
        multi = !nested;
      }
    if (multi) {
      out.removed.push_back(i);
      out.reasons.push_back("contains " + std::to_string(inside.size()) + " smaller masks");
    } else {
      out.kept.push_back(i);
    }
  }
  return out;
}

Partition remove_multi_berry(std::span<const MaskRecord> masks, const FilterConfig& cfg) {
  std::vector<BitGrid> grids;
  grids.reserve(masks.size());
  for (const auto& m : masks) grids.push_back(decode_rle(m.rle));
  return remove_multi_berry(std::span<const BitGrid>(grids), cfg);
}

Partition metric_filter(std::span<const MaskMeasure> masks, const FilterConfig& cfg) {
  const std::size_t n = masks.size();
  std::vector<std::string> reason(n);
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = masks[i];
    if (m.area_px <= 0.0)
      reason[i] = "empty";
    else if (m.area_px < cfg.min_area_px)
      reason[i] = "area below minimum";
    else if (m.area_px > cfg.max_area_px)
      reason[i] = "area above maximum";
    else if (m.aspect > cfg.max_aspect)
      reason[i] = "aspect";
    else
      alive.push_back(i);
  }

  // Distance trimming is repeated until stable: a far stain inflates the
  // cluster radius and can hide a second, nearer one.
  while (alive.size() >= 3) {
    std::size_t medoid = alive.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : alive) {
      double sum = 0.0;
      for (std::size_t j : alive) {
        const Point d = masks[i].centroid - masks[j].centroid;
        sum += std::hypot(d.x, d.y);
      }
      if (sum < best) {
        best = sum;
        medoid = i;
      }
    }
    double ss = 0.0;
    for (std::size_t i : alive) {
      const Point d = masks[i].centroid - masks[medoid].centroid;
      ss += d.x * d.x + d.y * d.y;
    }
    const double radius = std::sqrt(ss / static_cast<double>(alive.size()));
    if (radius <= 0.0) break;
    const double limit = cfg.max_centroid_distance * radius;
    std::vector<std::size_t> next;
    for (std::size_t i : alive) {
      const Point d = masks[i].centroid - masks[medoid].centroid;
      if (std::hypot(d.x, d.y) > limit)
        reason[i] = "distance";
      else
        next.push_back(i);
    }
    if (next.size() == alive.size()) break;
    alive = std::move(next);
  }

  Partition out;
  out.kept = alive;
  for (std::size_t i = 0; i < n; ++i)
    if (!reason[i].empty()) {
      out.removed.push_back(i);
      out.reasons.push_back(reason[i]);
    }
  return out;
}

Partition metric_filter(std::span<const MaskRecord> masks, const FilterConfig& cfg) {
  std::vector<MaskMeasure> measures;
  measures.reserve(masks.size());
  for (const auto& m : masks) measures.push_back(measure(prepare_mask(m)));
  return metric_filter(std::span<const MaskMeasure>(measures), cfg);
}

OutlierResult efd_pca_outlier_filter(std::span<const Contour> contours, const FilterConfig& cfg) {
  OutlierResult out;
  const std::size_t n = contours.size();
  const std::size_t minimum =
      std::max<std::size_t>(static_cast<std::size_t>(cfg.pca_components) + 2, 12);
  if (n < minimum) {
    out.skipped = true;
    out.warning = "efd_pca skipped: " + std::to_string(n) + " contours, need " +
                  std::to_string(minimum);
    out.partition.kept.resize(n);
    std::iota(out.partition.kept.begin(), out.partition.kept.end(), std::size_t{0});
    return out;
  }

  const int h = cfg.harmonics;
  std::vector<std::vector<double>> features(n);
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Contour dense = densify(contours[i], static_cast<std::size_t>(2 * h + 2));
      features[i] = efd_features(efd_normalize(efd_fit(dense, h)));
      alive.push_back(i);
    } catch (const GeometryError&) {
      out.partition.removed.push_back(i);
      out.partition.reasons.push_back("degenerate outline");
      out.removed_round.push_back(1);
    }
  }

  const Eigen::Index p = 4 * h;
  for (int round = 1; round <= cfg.pca_rounds; ++round) {
    if (alive.size() < minimum) {
      out.warning = "efd_pca stopped after round " + std::to_string(round - 1) + ": " +
                    std::to_string(alive.size()) + " contours left";
      break;
    }
    out.rounds_run = round;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(alive.size()), p);
    for (std::size_t r = 0; r < alive.size(); ++r)
      for (Eigen::Index c = 0; c < p; ++c)
        rows(static_cast<Eigen::Index>(r), c) = features[alive[r]][static_cast<std::size_t>(c)];
    const PcaModel model = pca_fit(rows);
    const Eigen::MatrixXd scores = pca_scores(model, rows);
    const Eigen::Index tested = std::min<Eigen::Index>(cfg.pca_components, model.component_count());

    std::vector<std::size_t> next;
    for (std::size_t r = 0; r < alive.size(); ++r) {
      int flagged = -1;
      for (Eigen::Index k = 0; k < tested && flagged < 0; ++k) {
        const double lambda = model.eigenvalues(k);
        if (lambda < 1e-12 || model.explained(k) < cfg.pca_min_explained) continue;
        if (std::abs(scores(static_cast<Eigen::Index>(r), k)) > cfg.pca_sd * std::sqrt(lambda))
          flagged = static_cast<int>(k);
      }
      if (flagged < 0) {
        next.push_back(alive[r]);
      } else {
        out.partition.removed.push_back(alive[r]);
        out.partition.reasons.push_back("PC" + std::to_string(flagged + 1) + " beyond " +
                                        std::to_string(cfg.pca_sd).substr(0, 4) + " SD");
        out.removed_round.push_back(round);
      }
    }
    const bool changed = next.size() != alive.size();
    alive = std::move(next);
    if (!changed) break;
  }
  out.partition.kept = alive;
  return out;
}

FilterOutcome run_filter_pipeline(std::span<const MaskRecord> masks, const FilterConfig& cfg,
                                  const std::optional<ReferenceSpec>& reference) {
  cfg.validate();
  FilterOutcome out;
  const std::size_t n = masks.size();
  out.prepared.reserve(n);
  for (const auto& m : masks) out.prepared.push_back(prepare_mask(m));

  auto& report = out.report;
  report.dispositions.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.dispositions[i].id = masks[i].id;
  auto reject = [&](std::size_t i, Stage stage, std::string why) {
    report.dispositions[i].stage = stage;
    report.dispositions[i].reason = std::move(why);
  };

  std::vector<BitGrid> grids;
  grids.reserve(n);
  for (const auto& p : out.prepared) grids.push_back(p.grid);
  const Partition multi = remove_multi_berry(std::span<const BitGrid>(grids), cfg);
  grids.clear();
  for (std::size_t k = 0; k < multi.removed.size(); ++k)
    reject(multi.removed[k], Stage::multi_berry, multi.reasons[k]);

  std::vector<MaskMeasure> measures;
  for (std::size_t i : multi.kept) measures.push_back(measure(out.prepared[i]));
  const Partition metric = metric_filter(std::span<const MaskMeasure>(measures), cfg);
  for (std::size_t k = 0; k < metric.removed.size(); ++k)
    reject(multi.kept[metric.removed[k]], Stage::metric, metric.reasons[k]);

  std::vector<std::size_t> stage3;
  std::vector<Contour> contours;
  for (std::size_t k : metric.kept) {
    stage3.push_back(multi.kept[k]);
    contours.push_back(*out.prepared[multi.kept[k]].smooth);
  }
  const OutlierResult shape = efd_pca_outlier_filter(std::span<const Contour>(contours), cfg);
  if (!shape.warning.empty()) report.warnings.push_back(shape.warning);
  for (std::size_t k = 0; k < shape.partition.removed.size(); ++k)
    reject(stage3[shape.partition.removed[k]], Stage::efd_pca,
           shape.partition.reasons[k] + " (round " + std::to_string(shape.removed_round[k]) + ")");
  for (std::size_t k : shape.partition.kept) out.kept.push_back(stage3[k]);
  std::sort(out.kept.begin(), out.kept.end());
  for (std::size_t i : out.kept) report.dispositions[i].reason = "berry";

  report.removed_multi = multi.removed.size();
  report.removed_metric = metric.removed.size();
  report.removed_efd_pca = shape.partition.removed.size();
  report.kept = out.kept.size();

  if (reference) {
    try {
      out.calibration = detect_reference(masks, out.prepared, *reference);
    } catch (const CalibrationError& e) {
      report.warnings.push_back(e.what());
    }
  }
  return out;
}

}  // namespace clustermorph
