#include <gtest/gtest.h>

#include <cmath>

#include "clustermorph/error.hpp"
#include "clustermorph/pca.hpp"
#include "clustermorph/synth.hpp"

using namespace clustermorph;

namespace {

Eigen::MatrixXd random_rows(Rng& rng, int n, int p) {
  Eigen::MatrixXd m(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal() * (j + 1) + 0.3 * (j > 0 ? m(i, j - 1) : 0.0);
  return m;
}

}  // namespace

TEST(Pca, PointsOnALine) {
  Eigen::MatrixXd rows(5, 2);
  for (int i = 0; i < 5; ++i) rows.row(i) << i, 2.0 * i;
  const PcaModel m = pca_fit(rows);
  EXPECT_NEAR(m.explained(0), 1.0, 1e-12);
  EXPECT_NEAR(m.eigenvalues(1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.loadings(1, 0) / m.loadings(0, 0)), 2.0, 1e-12);
}

TEST(Pca, IsotropicSampleSplitsEvenly) {
  Rng rng(1);
  Eigen::MatrixXd rows(10000, 2);
  for (int i = 0; i < 10000; ++i) rows.row(i) << rng.normal(), rng.normal();
  const PcaModel m = pca_fit(rows);
  EXPECT_NEAR(m.explained(0), 0.5, 0.05);
  EXPECT_NEAR(m.explained(1), 0.5, 0.05);
}

TEST(Pca, ModelInvariants) {
  Rng rng(2);
  const Eigen::MatrixXd rows = random_rows(rng, 50, 6);
  const PcaModel m = pca_fit(rows);
  const Eigen::MatrixXd gram = m.loadings.transpose() * m.loadings;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
  for (int i = 1; i < 6; ++i) EXPECT_GE(m.eigenvalues(i - 1), m.eigenvalues(i));
  const Eigen::MatrixXd centred = rows.rowwise() - rows.colwise().mean();
  const double total = (centred.array().square().colwise().sum() / 49.0).sum();
  EXPECT_NEAR(m.eigenvalues.sum(), total, 1e-8);
  EXPECT_NEAR(m.explained.sum(), 1.0, 1e-12);
  for (int j = 0; j < 6; ++j) {
    Eigen::Index arg = 0;
    m.loadings.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.loadings(arg, j), 0.0);
  }
}

TEST(Pca, FullRankReconstruction) {
  Rng rng(3);
  const Eigen::MatrixXd rows = random_rows(rng, 30, 4);
  const PcaModel m = pca_fit(rows);
  const Eigen::MatrixXd scores = pca_scores(m, rows);
  const Eigen::MatrixXd back = (scores * m.loadings.transpose()).rowwise() + m.mean.transpose();
  EXPECT_LT((back - rows).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(scores.colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pca, ScoresOfMeanAndHeldOutRow) {
  Rng rng(4);
  const PcaModel m = pca_fit(random_rows(rng, 40, 3));
  EXPECT_LT(pca_scores(m, m.mean.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::RowVector3d x(1.5, -2.0, 0.25);
  const Eigen::MatrixXd s = pca_scores(m, x);
  for (int j = 0; j < 3; ++j) {
    double dot = 0;
    for (int i = 0; i < 3; ++i) dot += (x(i) - m.mean(i)) * m.loadings(i, j);
    EXPECT_NEAR(s(0, j), dot, 1e-12);
  }
}

TEST(Pca, Errors) {
  EXPECT_ANY_THROW(pca_fit(Eigen::MatrixXd(1, 3)));
  Rng rng(5);
  const PcaModel m = pca_fit(random_rows(rng, 10, 3));
  EXPECT_ANY_THROW(pca_scores(m, Eigen::MatrixXd::Zero(2, 4)));
}

TEST(Pca, JsonRoundTrip) {
  Rng rng(6);
  const PcaModel m = pca_fit(random_rows(rng, 12, 3));
  const PcaModel back = pca_from_json(pca_to_json(m));
  EXPECT_EQ(back.mean, m.mean);
  EXPECT_EQ(back.loadings, m.loadings);
  EXPECT_EQ(back.eigenvalues, m.eigenvalues);
  EXPECT_EQ(back.explained, m.explained);
}
