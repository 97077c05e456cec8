#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace clustermorph {

struct RegressionFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double residual_sd = 0.0;
  std::size_t n = 0;
};

/// Least-squares line y = beta0 + beta1 x. A constant response gives r2 = 0.
/// Throws StatsError for fewer than three points, a length mismatch or a
/// constant predictor.
RegressionFit ols_fit(std::span<const double> x, std::span<const double> y);

/// beta0 + beta1 * visible.
double correct_count(const RegressionFit& fit, double visible);

/// Sample correlation. Throws StatsError for fewer than three points, a
/// length mismatch or a constant argument.
double pearson(std::span<const double> x, std::span<const double> y);

struct RepeatabilityResult {
  double var_g = 0.0;
  double var_e = 0.0;
  double repeatability = 0.0;
  std::size_t n_groups = 0;
  double n_per_group_effective = 0.0;  ///< n0
  double ms_between = 0.0;
  double ms_within = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
};

/// One-way random-effects ANOVA by the method of moments:
/// var_e = MS_within, var_g = max(0, (MS_between - MS_within) / n0) with
/// n0 = (N - sum n_i^2 / N) / (k - 1). When both components are zero the
/// repeatability is 0. Throws StatsError for a single group or fewer than
/// two residual degrees of freedom.
RepeatabilityResult repeatability(std::span<const double> values,
                                  std::span<const std::string> groups);

/// Same model with an additive fixed block effect. MS_between is the
/// genotype mean square adjusted for blocks; MS_within is the residual of
/// the genotype + block fit.
RepeatabilityResult repeatability(std::span<const double> values,
                                  std::span<const std::string> groups,
                                  std::span<const std::string> blocks);

}  // namespace clustermorph
