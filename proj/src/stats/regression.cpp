#include <algorithm>
#include <cmath>

#include "clustermorph/error.hpp"
#include "clustermorph/stats.hpp"

namespace clustermorph {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("x and y differ in length");
  if (x.size() < 3) throw StatsError("need at least three observations");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

RegressionFit ols_fit(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw StatsError("predictor is constant");

  RegressionFit f;
  f.n = x.size();
  f.beta1 = sxy / sxx;
  f.beta0 = my - f.beta1 * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.beta0 - f.beta1 * x[i];
    sse += e * e;
  }
  const double n = static_cast<double>(f.n);
  f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 0.0;
  f.adj_r2 = 1.0 - (1.0 - f.r2) * (n - 1.0) / (n - 2.0);
  f.residual_sd = std::sqrt(sse / (n - 2.0));
  return f;
}

double correct_count(const RegressionFit& fit, double visible) {
  return fit.beta0 + fit.beta1 * visible;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw StatsError("correlation of a constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace clustermorph
