#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"

namespace clustermorph::cli {
namespace {

std::string slurp(const std::filesystem::path& p, const char* table) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError(std::string("missing table ") + table + " in " + p.parent_path().string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string f(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string cmd_report(const std::filesystem::path& dir) {
  using nlohmann::json;
  json manifest;
  try {
    manifest = json::parse(slurp(dir / "manifest.json", "manifest.json"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
  std::istringstream clusters_in(slurp(dir / "clusters.csv", "clusters.csv"));
  const CsvTable clusters = read_csv(clusters_in);

  std::ostringstream out;
  const json& t = manifest.at("totals");
  out << "images: " << t.at("images").get<long>() << " (ok " << t.at("ok").get<long>() << ", warning "
      << t.at("warning").get<long>() << ", error " << t.at("error").get<long>() << ")\n";
  out << "config hash: " << manifest.at("config_hash").get<std::string>() << "\n";

  const double in = t.at("masks_in").get<double>();
  const double kept = t.at("kept").get<double>();
  out << "\nfilter attrition\n";
  out << "  masks in           " << t.at("masks_in").get<long>() << "\n";
  out << "  outside ROI        " << t.at("roi_dropped").get<long>() << "\n";
  out << "  multi-berry        " << t.at("removed_multi").get<long>() << "\n";
  out << "  metric             " << t.at("removed_metric").get<long>() << "\n";
  out << "  shape outliers     " << t.at("removed_efd_pca").get<long>() << "\n";
  out << "  kept berries       " << t.at("kept").get<long>() << "\n";
  if (in > 0) {
    const double pct = 100.0 * (in - kept) / in;
    out << "  attrition          " << f("%.1f%%", pct) << "\n";
    if (kept == 0) out << "attrition reached 100%: no berries kept\n";
  }

  const long status_col = clusters.column("status");
  const long count_col = clusters.column("berry_count");
  const long truth_col = clusters.column("true_count");
  std::vector<double> counts;
  double truth_total = 0.0, kept_with_truth = 0.0;
  std::size_t with_truth = 0;
  for (std::size_t r = 0; r < clusters.rows.size(); ++r) {
    const auto& row = clusters.rows[r];
    if (status_col >= 0 && row[static_cast<std::size_t>(status_col)] == "error") continue;
    const double c = count_col >= 0 ? parse_number(row[static_cast<std::size_t>(count_col)], static_cast<long>(r + 1))
                                    : std::nan("");
    if (std::isnan(c)) continue;
    counts.push_back(c);
    if (truth_col >= 0) {
      const double tc = parse_number(row[static_cast<std::size_t>(truth_col)], static_cast<long>(r + 1));
      if (!std::isnan(tc)) {
        truth_total += tc;
        kept_with_truth += c;
        ++with_truth;
      }
    }
  }
  out << "\nberries per cluster view\n";
  if (counts.empty()) {
    out << "  no cluster views\n";
  } else {
    double sum = 0.0;
    for (double c : counts) sum += c;
    out << "  views    " << counts.size() << "\n";
    out << "  mean     " << f("%.2f", sum / static_cast<double>(counts.size())) << "\n";
    out << "  median   " << f("%.1f", median(counts)) << "\n";
    out << "  range    " << f("%.0f", *std::min_element(counts.begin(), counts.end())) << " - "
        << f("%.0f", *std::max_element(counts.begin(), counts.end())) << "\n";
  }
  if (with_truth) {
    out << "\nground truth (" << with_truth << " views)\n";
    out << "  true berries       " << f("%.0f", truth_total) << "\n";
    out << "  kept berries       " << f("%.0f", kept_with_truth) << "\n";
    out << "  kept / true        " << f("%.4f", kept_with_truth / truth_total) << "\n";
  }

  const json& pop = manifest.at("population");
  if (pop.contains("count_fit")) {
    const json& fit = pop["count_fit"];
    out << "\ncount correction: true = " << f("%.4f", fit.at("beta0").get<double>()) << " + "
        << f("%.4f", fit.at("beta1").get<double>()) << " * best-view count (adj R2 "
        << f("%.4f", fit.at("adj_r2").get<double>()) << ", n " << fit.at("n").get<long>() << ")\n";
  }

  const auto rep_path = dir / "repeatability.csv";
  if (std::filesystem::exists(rep_path)) {
    std::istringstream rin(slurp(rep_path, "repeatability.csv"));
    const CsvTable rep = read_csv(rin);
    const long tc = rep.column("trait"), rc = rep.column("repeatability"), gc = rep.column("var_g"),
               ec = rep.column("var_e");
    out << "\nrepeatability\n";
    char line[160];
    std::snprintf(line, sizeof line, "  %-18s %12s %14s %14s\n", "trait", "R", "var_g", "var_e");
    out << line;
    for (const auto& row : rep.rows) {
      const std::string& r = row[static_cast<std::size_t>(rc)];
      if (r.empty()) {
        std::snprintf(line, sizeof line, "  %-18s %12s\n", row[static_cast<std::size_t>(tc)].c_str(), "n/a");
      } else {
        std::snprintf(line, sizeof line, "  %-18s %12.4f %14.6g %14.6g\n", row[static_cast<std::size_t>(tc)].c_str(),
                      parse_number(r), parse_number(row[static_cast<std::size_t>(gc)]),
                      parse_number(row[static_cast<std::size_t>(ec)]));
      }
      out << line;
    }
  }

  const auto& warnings = pop.at("warnings");
  if (!warnings.empty()) {
    out << "\npopulation warnings\n";
    for (const auto& w : warnings) out << "  " << w.get<std::string>() << "\n";
  }
  return out.str();
}

}  // namespace clustermorph::cli
