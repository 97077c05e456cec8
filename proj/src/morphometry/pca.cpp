#include "clustermorph/pca.hpp"

#include <json.hpp>

#include "clustermorph/error.hpp"

namespace clustermorph {

PcaModel pca_fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw StatsError("PCA needs at least 2 observations");
  if (rows.cols() < 1) throw StatsError("PCA needs at least 1 feature");
  PcaModel model;
  model.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw StatsError("eigendecomposition failed");

  const Eigen::Index p = cov.cols();
  model.loadings.resize(p, p);
  model.eigenvalues.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index src = p - 1 - k;  // solver sorts ascending
    model.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(src));
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < p; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg)) * (1.0 + 1e-12)) arg = i;
    }
    if (v(arg) < 0.0) v = -v;
    model.loadings.col(k) = v;
  }
  const double total = model.eigenvalues.sum();
  model.explained = total > 0.0 ? Eigen::VectorXd(model.eigenvalues / total)
                                : Eigen::VectorXd::Zero(p);
  return model;
}

Eigen::MatrixXd pca_scores(const PcaModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.mean.size()) {
    throw DimensionError("feature count " + std::to_string(rows.cols()) +
                         " does not match the model (" + std::to_string(model.mean.size()) + ")");
  }
  return (rows.rowwise() - model.mean.transpose()) * model.loadings;
}

std::string pca_to_json(const PcaModel& model) {
  nlohmann::ordered_json j;
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(),
                                         model.eigenvalues.data() + model.eigenvalues.size());
  j["explained"] = std::vector<double>(model.explained.data(),
                                       model.explained.data() + model.explained.size());
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < model.loadings.cols(); ++k) {
    const Eigen::VectorXd c = model.loadings.col(k);
    cols.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  j["loadings"] = cols;
  return j.dump(1);
}

PcaModel pca_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  PcaModel m;
  m.mean = vec(j.at("mean"));
  m.eigenvalues = vec(j.at("eigenvalues"));
  m.explained = vec(j.at("explained"));
  const auto& cols = j.at("loadings");
  m.loadings.resize(m.mean.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Eigen::VectorXd c = vec(cols[k]);
    if (c.size() != m.mean.size()) throw ParseError("loading column has the wrong length");
    m.loadings.col(static_cast<Eigen::Index>(k)) = c;
  }
  return m;
}

}  // namespace clustermorph
