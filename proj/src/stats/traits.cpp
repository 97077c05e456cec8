#include "clustermorph/traits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "clustermorph/csv.hpp"
#include "clustermorph/error.hpp"

namespace clustermorph {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<std::string_view, 5> kKeyColumns = {"genotype", "block", "vine", "cluster",
                                                         "angle"};

}  // namespace

std::size_t trait_index(std::string_view name) {
  for (std::size_t i = 0; i < kTraitCount; ++i)
    if (kTraitNames[i] == name) return i;
  throw StatsError("unknown trait '" + std::string(name) + "'");
}

TraitRow::TraitRow() { values.fill(kNaN); }

void TraitTable::add(TraitRow row) {
  if (!index_.emplace(row.key, rows_.size()).second)
    throw StatsError("duplicate trait row for genotype " + row.key.genotype + " cluster " +
                     row.key.cluster + " angle " + std::to_string(row.key.angle));
  rows_.push_back(std::move(row));
}

void TraitTable::write_csv(std::ostream& out) const {
  for (auto c : kKeyColumns) out << c << ',';
  for (std::size_t i = 0; i < kTraitCount; ++i) out << kTraitNames[i] << (i + 1 < kTraitCount ? "," : "\n");
  for (const auto& r : rows_) {
    out << csv_field(r.key.genotype) << ',' << csv_field(r.key.block) << ','
        << csv_field(r.key.vine) << ',' << csv_field(r.key.cluster) << ',' << r.key.angle;
    for (double v : r.values) out << ',' << csv_number(v);
    out << '\n';
  }
}

TraitTable TraitTable::read_csv(std::istream& in) {
  const CsvTable csv = clustermorph::read_csv(in);
  std::array<long, 5> key_col{};
  for (std::size_t i = 0; i < kKeyColumns.size(); ++i) {
    key_col[i] = csv.column(kKeyColumns[i]);
    if (key_col[i] < 0) throw ParseError("trait table lacks column " + std::string(kKeyColumns[i]));
  }
  std::array<long, kTraitCount> trait_col{};
  for (std::size_t i = 0; i < kTraitCount; ++i) trait_col[i] = csv.column(kTraitNames[i]);

  TraitTable t;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& f = csv.rows[r];
    const long row = static_cast<long>(r + 1);
    TraitRow tr;
    tr.key.genotype = f[static_cast<std::size_t>(key_col[0])];
    tr.key.block = f[static_cast<std::size_t>(key_col[1])];
    tr.key.vine = f[static_cast<std::size_t>(key_col[2])];
    tr.key.cluster = f[static_cast<std::size_t>(key_col[3])];
    const double angle = parse_number(f[static_cast<std::size_t>(key_col[4])], row);
    if (!std::isfinite(angle) || angle != std::floor(angle))
      throw ParseError("angle must be an integer", row);
    tr.key.angle = static_cast<int>(angle);
    for (std::size_t i = 0; i < kTraitCount; ++i)
      if (trait_col[i] >= 0) tr.values[i] = parse_number(f[static_cast<std::size_t>(trait_col[i])], row);
    try {
      t.add(std::move(tr));
    } catch (const StatsError& e) {
      throw ParseError(e.what(), row);
    }
  }
  return t;
}

TraitSummary trait_summary(const TraitTable& table, bool block_adjusted) {
  if (table.empty()) throw StatsError("trait table is empty");
  const auto& rows = table.rows();
  {
    std::vector<std::string> names;
    for (const auto& r : rows) names.push_back(r.key.genotype);
    std::sort(names.begin(), names.end());
    if (std::unique(names.begin(), names.end()) - names.begin() < 2)
      throw StatsError("trait summary needs at least two genotypes");
  }

  TraitSummary out;
  for (std::size_t t = 0; t < kTraitCount; ++t) {
    std::map<std::string, std::vector<double>> by_genotype;
    std::vector<double> values;
    std::vector<std::string> groups, blocks;
    for (const auto& r : rows) {
      const double v = r.values[t];
      if (!std::isfinite(v)) continue;
      by_genotype[r.key.genotype].push_back(v);
      values.push_back(v);
      groups.push_back(r.key.genotype);
      blocks.push_back(r.key.block);
    }
    auto& summary = out.genotypes[t];
    for (auto& [name, v] : by_genotype) {
      std::sort(v.begin(), v.end());
      GenotypeSummary s;
      s.genotype = name;
      s.n = v.size();
      double sum = 0.0;
      for (double x : v) sum += x;
      s.mean = sum / static_cast<double>(s.n);
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : kNaN;
      s.min = v.front();
      s.max = v.back();
      s.median = s.n % 2 ? v[s.n / 2] : 0.5 * (v[s.n / 2 - 1] + v[s.n / 2]);
      summary.push_back(std::move(s));
    }
    std::stable_sort(summary.begin(), summary.end(),
                     [](const GenotypeSummary& a, const GenotypeSummary& b) { return a.mean < b.mean; });
    try {
      out.repeatability[t] = block_adjusted ? repeatability(values, groups, blocks)
                                            : repeatability(values, groups);
    } catch (const StatsError& e) {
      out.warnings.push_back(std::string(kTraitNames[t]) + ": " + e.what());
    }
  }

  const auto p = static_cast<Eigen::Index>(kTraitCount);
  out.correlation = Eigen::MatrixXd::Constant(p, p, kNaN);
  for (std::size_t a = 0; a < kTraitCount; ++a)
    for (std::size_t b = a; b < kTraitCount; ++b) {
      std::vector<double> x, y;
      for (const auto& r : rows)
        if (std::isfinite(r.values[a]) && std::isfinite(r.values[b])) {
          x.push_back(r.values[a]);
          y.push_back(r.values[b]);
        }
      double c = kNaN;
      try {
        c = a == b ? 1.0 : pearson(x, y);
        if (a == b && x.size() < 3) c = kNaN;
      } catch (const StatsError&) {
      }
      out.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = c;
      out.correlation(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = c;
    }
  return out;
}

}  // namespace clustermorph
