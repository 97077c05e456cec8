#include <algorithm>
#include <map>

#include <Eigen/Dense>

#include "clustermorph/error.hpp"
#include "clustermorph/stats.hpp"

namespace clustermorph {

namespace {

// Dense 0-based level codes in order of first appearance.
std::vector<std::size_t> codes(std::span<const std::string> labels, std::size_t& levels) {
  std::map<std::string, std::size_t> seen;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(seen.emplace(l, seen.size()).first->second);
  levels = seen.size();
  return out;
}

void finish(RepeatabilityResult& r, std::span<const std::size_t> group,
            std::size_t k) {
  const double big_n = static_cast<double>(group.size());
  std::vector<double> sizes(k, 0.0);
  for (std::size_t g : group) sizes[g] += 1.0;
  double sum_sq = 0.0;
  for (double s : sizes) sum_sq += s * s;
  r.n_groups = k;
  r.n_per_group_effective = (big_n - sum_sq / big_n) / static_cast<double>(k - 1);
  r.var_e = r.ms_within;
  r.var_g = std::max(0.0, (r.ms_between - r.ms_within) / r.n_per_group_effective);
  const double total = r.var_g + r.var_e;
  r.repeatability = total > 0.0 ? r.var_g / total : 0.0;
}

}  // namespace

RepeatabilityResult repeatability(std::span<const double> values,
                                  std::span<const std::string> groups) {
  if (values.size() != groups.size()) throw StatsError("values and groups differ in length");
  std::size_t k = 0;
  const auto g = codes(groups, k);
  if (k < 2) throw StatsError("repeatability needs at least two groups");
  if (values.size() < k + 2) throw StatsError("repeatability needs two replicates beyond the groups");

  std::vector<double> sum(k, 0.0), count(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum[g[i]] += values[i];
    count[g[i]] += 1.0;
    grand += values[i];
  }
  grand /= static_cast<double>(values.size());
  double ssw = 0.0, ssb = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - sum[g[i]] / count[g[i]];
    ssw += d * d;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double d = sum[j] / count[j] - grand;
    ssb += count[j] * d * d;
  }
  RepeatabilityResult r;
  r.df_between = k - 1;
  r.df_within = values.size() - k;
  r.ms_between = ssb / static_cast<double>(r.df_between);
  r.ms_within = ssw / static_cast<double>(r.df_within);
  finish(r, g, k);
  return r;
}

RepeatabilityResult repeatability(std::span<const double> values,
                                  std::span<const std::string> groups,
                                  std::span<const std::string> blocks) {
  if (values.size() != groups.size() || values.size() != blocks.size())
    throw StatsError("values, groups and blocks differ in length");
  std::size_t k = 0, nb = 0;
  const auto g = codes(groups, k);
  const auto b = codes(blocks, nb);
  if (k < 2) throw StatsError("repeatability needs at least two groups");
  const auto n = static_cast<Eigen::Index>(values.size());
  const Eigen::Map<const Eigen::VectorXd> y(values.data(), n);

  // Residual sum of squares and rank of y ~ 1 + blocks (+ groups).
  auto fit = [&](bool with_groups, Eigen::Index& rank) {
    const Eigen::Index cols = 1 + static_cast<Eigen::Index>(nb - 1) +
                              (with_groups ? static_cast<Eigen::Index>(k - 1) : 0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      const auto bi = b[static_cast<std::size_t>(i)];
      if (bi > 0) x(i, static_cast<Eigen::Index>(bi)) = 1.0;
      const auto gi = g[static_cast<std::size_t>(i)];
      if (with_groups && gi > 0) x(i, static_cast<Eigen::Index>(nb - 1 + gi)) = 1.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    rank = qr.rank();
    const Eigen::VectorXd resid = y - x * qr.solve(y);
    return resid.squaredNorm();
  };
  Eigen::Index rank_full = 0, rank_block = 0;
  const double sse_full = fit(true, rank_full);
  const double sse_block = fit(false, rank_block);
  if (n - rank_full < 2) throw StatsError("block-adjusted repeatability needs two residual degrees of freedom");
  if (rank_full - rank_block < 1) throw StatsError("genotype effect is confounded with blocks");

  RepeatabilityResult r;
  r.df_between = static_cast<std::size_t>(rank_full - rank_block);
  r.df_within = static_cast<std::size_t>(n - rank_full);
  r.ms_between = std::max(0.0, sse_block - sse_full) / static_cast<double>(r.df_between);
  r.ms_within = sse_full / static_cast<double>(r.df_within);
  finish(r, g, k);
  return r;
}

}  // namespace clustermorph
