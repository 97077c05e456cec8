#include "cli/plots.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "clustermorph/error.hpp"
#include "clustermorph/hull.hpp"
#include "clustermorph/shape.hpp"

namespace clustermorph::cli {
namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

// maps data coordinates onto a panel rectangle, y up
struct Frame {
  double left, top, w, h;
  double x0, x1, y0, y1;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
  double py(double y) const { return top + h - (y - y0) / (y1 - y0) * h; }
};

void axes(Svg& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel, int ticks = 4) {
  svg.rect(f.left, f.top, f.w, f.h, "fill:none;stroke:#444;stroke-width:1");
  for (int i = 0; i <= ticks; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / ticks;
    const double yv = f.y0 + (f.y1 - f.y0) * i / ticks;
    svg.line(f.px(xv), f.top + f.h, f.px(xv), f.top + f.h + 4, "stroke:#444");
    svg.text(f.px(xv), f.top + f.h + 16, fmt2(xv), "font-size:10px;text-anchor:middle");
    svg.line(f.left - 4, f.py(yv), f.left, f.py(yv), "stroke:#444");
    svg.text(f.left - 6, f.py(yv) + 3, fmt2(yv), "font-size:10px;text-anchor:end");
  }
  svg.text(f.left + f.w / 2, f.top + f.h + 32, xlabel, "font-size:12px;text-anchor:middle");
  svg.text(f.left - 40, f.top + f.h / 2, ylabel, "font-size:12px;text-anchor:middle");
}

std::string staircase(const Frame& f, const EcdfProfile& p) {
  std::string d = "M" + fmt2(f.px(1)) + " " + fmt2(f.py(p.values[0]));
  for (int t = 2; t <= 100; ++t) {
    d += " H" + fmt2(f.px(t));
    d += " V" + fmt2(f.py(p.values[static_cast<std::size_t>(t - 1)]));
  }
  return d;
}

std::string view_label(const ClusterRecord& r) {
  return r.has_key ? "angle " + std::to_string(r.key.angle) : r.image_id;
}

}  // namespace

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string series_colour(std::size_t i) {
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  return palette[i % 8];
}

Svg::Svg(double width, double height) : width_(width), height_(height) {}

void Svg::rect(double x, double y, double w, double h, const std::string& style) {
  body_ += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" + fmt2(w) + "\" height=\"" + fmt2(h) +
           "\" style=\"" + style + "\"/>\n";
}

void Svg::line(double x1, double y1, double x2, double y2, const std::string& style) {
  body_ += "<line x1=\"" + fmt2(x1) + "\" y1=\"" + fmt2(y1) + "\" x2=\"" + fmt2(x2) + "\" y2=\"" + fmt2(y2) +
           "\" style=\"" + style + "\"/>\n";
}

void Svg::circle(double cx, double cy, double r, const std::string& style) {
  body_ += "<circle cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) + "\" r=\"" + fmt2(r) + "\" style=\"" + style +
           "\"/>\n";
}

void Svg::path(const std::string& d, const std::string& style) {
  body_ += "<path d=\"" + d + "\" style=\"" + style + "\"/>\n";
}

void Svg::polygon(std::span<const Point> points, const std::string& style) {
  std::string pts;
  for (const Point& p : points) {
    if (!pts.empty()) pts += ' ';
    pts += fmt2(p.x) + "," + fmt2(p.y);
  }
  body_ += "<polygon points=\"" + pts + "\" style=\"" + style + "\"/>\n";
}

void Svg::text(double x, double y, const std::string& content, const std::string& style) {
  body_ += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\"";
  if (!style.empty()) body_ += " style=\"" + style + "\"";
  body_ += ">" + escape(content) + "</text>\n";
}

std::string Svg::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt2(width_) + "\" height=\"" + fmt2(height_) + "\" viewBox=\"0 0 " + fmt2(width_) + " " +
         fmt2(height_) + "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

std::string ecdf_svg(const std::string& title, std::span<const EcdfSeries> series) {
  Svg svg(760, 380);
  svg.text(380, 22, title, "font-size:14px;text-anchor:middle");
  const Frame fx{70, 40, 280, 260, 0, 100, 0, 1};
  const Frame fy{450, 40, 280, 260, 0, 100, 0, 1};
  axes(svg, fx, "scaled x", "F(x)");
  axes(svg, fy, "scaled y (top to tip)", "F(y)");
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string style = "fill:none;stroke-width:1.5;stroke:" + series_colour(i);
    svg.path(staircase(fx, series[i].x), style);
    svg.path(staircase(fy, series[i].y), style);
    svg.text(80, 56 + 14.0 * static_cast<double>(i), series[i].label,
             "font-size:11px;fill:" + series_colour(i));
  }
  return svg.str();
}

std::vector<HullPanel> hull_sweep(std::span<const Contour> berries, std::span<const double> concavities) {
  std::vector<Point> pts;
  for (const auto& c : berries) pts.insert(pts.end(), c.points().begin(), c.points().end());
  std::vector<HullPanel> out;
  for (double c : concavities) {
    HullPolygon h = concave_hull(pts, c);
    out.push_back({c, h.polygon, polygon_area(h.polygon)});
  }
  return out;
}

std::string hull_svg(const std::string& title, std::span<const Contour> berries, std::span<const HullPanel> panels) {
  const double side = 260.0, gap = 20.0;
  const double width = gap + static_cast<double>(panels.size()) * (side + gap);
  Svg svg(std::max(width, 300.0), side + 90);
  svg.text(std::max(width, 300.0) / 2, 22, title, "font-size:14px;text-anchor:middle");

  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& p : panels)
    for (const Point& q : p.hull.points()) {
      x0 = std::min(x0, q.x), x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y), y1 = std::max(y1, q.y);
    }
  for (const auto& c : berries)
    for (const Point& q : c.points()) {
      x0 = std::min(x0, q.x), x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y), y1 = std::max(y1, q.y);
    }
  const double span = std::max({x1 - x0, y1 - y0, 1.0});
  const double k = (side - 10.0) / span;

  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double left = gap + static_cast<double>(i) * (side + gap);
    const double top = 40.0;
    // image coordinates already grow downwards, as in SVG
    auto map = [&](const Point& q) { return Point{left + 5 + (q.x - x0) * k, top + 5 + (q.y - y0) * k}; };
    svg.rect(left, top, side, side, "fill:none;stroke:#bbb");
    for (const auto& c : berries) {
      std::vector<Point> mapped;
      for (const Point& q : c.points()) mapped.push_back(map(q));
      svg.polygon(mapped, "fill:#9c5fa8;fill-opacity:0.6;stroke:#5b2c6f;stroke-width:0.5");
    }
    std::vector<Point> hull;
    for (const Point& q : panels[i].hull.points()) hull.push_back(map(q));
    svg.polygon(hull, "fill:none;stroke:#d62728;stroke-width:1.5");
    svg.text(left + side / 2, top + side + 18, "c = " + fmt2(panels[i].concavity),
             "font-size:12px;text-anchor:middle");
    svg.text(left + side / 2, top + side + 34, "area = " + fmt2(panels[i].area) + " px2",
             "font-size:11px;text-anchor:middle");
  }
  return svg.str();
}

std::string pca_svg(const std::string& title, std::span<const ScatterPoint> points, double explained1,
                    double explained2) {
  Svg svg(520, 440);
  svg.text(260, 22, title, "font-size:14px;text-anchor:middle");
  double lo_x = -1e-9, hi_x = 1e-9, lo_y = -1e-9, hi_y = 1e-9;
  for (const auto& p : points) {
    lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
  }
  const double mx = 0.05 * (hi_x - lo_x), my = 0.05 * (hi_y - lo_y);
  const Frame f{80, 40, 400, 330, lo_x - mx, hi_x + mx, lo_y - my, hi_y + my};
  axes(svg, f, "PC1 (" + fmt2(100 * explained1) + "%)", "PC2 (" + fmt2(100 * explained2) + "%)");
  for (const auto& p : points) {
    svg.circle(f.px(p.x), f.py(p.y), 3.5, "fill:#1f77b4;fill-opacity:0.8");
  }
  return svg.str();
}

std::string angle_svg(const std::string& title, std::span<const AngleLine> lines) {
  Svg svg(520, 400);
  svg.text(260, 22, title, "font-size:14px;text-anchor:middle");
  double lo = 0.5, hi = 1.5;
  for (const auto& l : lines)
    for (double r : l.variation.count_ratio) lo = std::min(lo, r), hi = std::max(hi, r);
  const Frame f{80, 40, 400, 290, 0, 270, lo, hi};
  axes(svg, f, "view angle (deg)", "count / count at 0", 3);
  svg.line(f.px(0), f.py(1), f.px(270), f.py(1), "stroke:#999;stroke-dasharray:4 3");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& v = lines[i].variation;
    std::string d;
    for (std::size_t k = 0; k < v.angles.size(); ++k)
      d += (k ? " L" : "M") + fmt2(f.px(v.angles[k])) + " " + fmt2(f.py(v.count_ratio[k]));
    svg.path(d, "fill:none;stroke-width:1.2;stroke:" + series_colour(i));
  }
  return svg.str();
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "ecdf") return PlotKind::ecdf;
  if (name == "hulls") return PlotKind::hulls;
  if (name == "pca") return PlotKind::pca;
  if (name == "angle") return PlotKind::angle;
  throw ConfigError("unknown plot kind '" + std::string(name) + "' (ecdf, hulls, pca, angle)");
}

std::vector<std::pair<std::string, std::string>> render_plots(const ClusterDocument& doc, PlotKind kind) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, std::vector<const ClusterRecord*>> groups;
  for (const auto& c : doc.clusters) groups[cluster_group(c)].push_back(&c);

  switch (kind) {
    case PlotKind::ecdf:
      for (auto& [name, views] : groups) {
        std::sort(views.begin(), views.end(),
                  [](const ClusterRecord* a, const ClusterRecord* b) { return a->key.angle < b->key.angle; });
        std::vector<EcdfSeries> series;
        for (const auto* v : views) series.push_back({view_label(*v), v->ecdf_x, v->ecdf_y});
        out.emplace_back("ecdf_" + sanitize(name) + ".svg", ecdf_svg("Berry position ECDF: " + name, series));
      }
      break;
    case PlotKind::hulls: {
      const double sweep[] = {1.0, 0.75, 0.5, 0.25};
      for (const auto& c : doc.clusters) {
        const auto panels = hull_sweep(c.berries, sweep);
        out.emplace_back("hulls_" + sanitize(c.image_id) + ".svg",
                         hull_svg("Concave hulls: " + c.image_id, c.berries, panels));
      }
      break;
    }
    case PlotKind::pca: {
      std::vector<ScatterPoint> pts;
      for (const auto& c : doc.clusters)
        if (c.pc_scores.size() >= 2) pts.push_back({c.image_id, c.pc_scores[0], c.pc_scores[1]});
      if (pts.empty()) break;
      const double e1 = doc.explained.size() > 0 ? doc.explained[0] : 0.0;
      const double e2 = doc.explained.size() > 1 ? doc.explained[1] : 0.0;
      out.emplace_back("pca.svg", pca_svg("Hull shape scores", pts, e1, e2));
      break;
    }
    case PlotKind::angle: {
      std::vector<AngleLine> lines;
      for (const auto& [name, views] : groups) {
        if (views.size() < 2) continue;
        AngleSeries s;
        s.cluster_id = name;
        for (const auto* v : views) {
          double max_area = 0.0;
          for (const auto& b : v->berries) max_area = std::max(max_area, polygon_area(b));
          s.views.push_back({v->key.angle, static_cast<double>(v->berry_count), max_area});
        }
        try {
          lines.push_back({name, angle_variation(s)});
        } catch (const GeometryError&) {
          // no 0 degree view or repeated angles: nothing to compare against
        }
      }
      if (!lines.empty()) out.emplace_back("angle.svg", angle_svg("Berry count by view angle", lines));
      break;
    }
  }
  return out;
}

std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& results_dir, PlotKind kind,
                                            const std::filesystem::path& out_dir) {
  const auto src = results_dir / "clusters.json";
  std::ifstream in(src, std::ios::binary);
  if (!in) throw ParseError("missing table clusters.json in " + results_dir.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const ClusterDocument doc = parse_clusters_json(ss.str());
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, svg] : render_plots(doc, kind)) {
    written.push_back(out_dir / name);
    write_atomic(written.back(), svg);
  }
  return written;
}

}  // namespace clustermorph::cli
