#pragma once

#include <string>

#include <Eigen/Dense>

namespace clustermorph {

/// Covariance PCA. Columns of `loadings` are unit eigenvectors ordered by
/// non-increasing eigenvalue; each is signed so its largest-magnitude entry
/// is positive.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd loadings;  ///< features x components
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd explained;  ///< eigenvalue / total variance

  Eigen::Index feature_count() const noexcept { return mean.size(); }
  Eigen::Index component_count() const noexcept { return loadings.cols(); }
};

/// Fit on rows = observations. Needs at least two rows and one column.
PcaModel pca_fit(const Eigen::MatrixXd& rows);

/// (rows - mean) * loadings.
Eigen::MatrixXd pca_scores(const PcaModel& model, const Eigen::MatrixXd& rows);

std::string pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const std::string& text);

}  // namespace clustermorph
