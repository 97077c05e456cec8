#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cli/pipeline.hpp"
#include "clustermorph/architecture.hpp"
#include "clustermorph/ecdf.hpp"
#include "clustermorph/geometry.hpp"

namespace clustermorph::cli {

/// Small SVG 1.1 writer. Coordinates are printed with two decimals so the
/// output bytes depend only on the inputs.
class Svg {
 public:
  Svg(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& style);
  void line(double x1, double y1, double x2, double y2, const std::string& style);
  void circle(double cx, double cy, double r, const std::string& style);
  void path(const std::string& d, const std::string& style);
  void polygon(std::span<const Point> points, const std::string& style);
  void text(double x, double y, const std::string& content, const std::string& style = {});
  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string fmt2(double v);
/// Palette colour for series i.
std::string series_colour(std::size_t i);

struct EcdfSeries {
  std::string label;
  EcdfProfile x;
  EcdfProfile y;
};

/// Two panels (x and y axis), one 100-sample staircase per series.
std::string ecdf_svg(const std::string& title, std::span<const EcdfSeries> series);

struct HullPanel {
  double concavity = 1.0;
  Contour hull;
  double area = 0.0;
};

/// Concave hulls over every outline vertex, one per concavity value.
std::vector<HullPanel> hull_sweep(std::span<const Contour> berries,
                                  std::span<const double> concavities);

/// One panel per hull: berry polygons filled, hull outlined.
std::string hull_svg(const std::string& title, std::span<const Contour> berries,
                     std::span<const HullPanel> panels);

struct ScatterPoint {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

std::string pca_svg(const std::string& title, std::span<const ScatterPoint> points,
                    double explained1, double explained2);

struct AngleLine {
  std::string label;
  AngleVariation variation;
};

/// Count ratio relative to 0 degrees against view angle.
std::string angle_svg(const std::string& title, std::span<const AngleLine> lines);

enum class PlotKind { ecdf, hulls, pca, angle };

/// Throws ConfigError for an unknown name.
PlotKind parse_plot_kind(std::string_view name);

/// File name and SVG text of every plot of `kind`: one ECDF overlay per
/// cluster (all its views), one hull sweep (c = 1, 0.75, 0.5, 0.25) per
/// view, one hull-shape score scatter, one angle-variation chart.
std::vector<std::pair<std::string, std::string>> render_plots(const ClusterDocument& doc,
                                                              PlotKind kind);

/// Regenerate plots of `kind` from a results folder (reads clusters.json).
/// Returns the files written. Throws ParseError naming the absent table
/// when clusters.json is missing.
std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& results_dir,
                                            PlotKind kind,
                                            const std::filesystem::path& out_dir);

}  // namespace clustermorph::cli
