#include <cmath>

#include <Eigen/Eigenvalues>

#include "peloton/analysis.hpp"
#include "peloton/errors.hpp"

namespace peloton {

PcaResult pca_project(const Matrix& data, std::size_t n_components) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (n < 2) throw UsageError("PCA needs at least two rows");
  if (n_components < 1 || n_components > std::min(n, d)) {
    throw UsageError("PCA component count must lie in [1, min(rows, columns)]");
  }

  PcaResult out;
  out.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd covariance =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) throw ContractError("covariance eigensolver failed");

  // Eigenvalues come back ascending.
  const auto c = static_cast<Eigen::Index>(n_components);
  out.components.resize(c, static_cast<Eigen::Index>(d));
  out.explained_variance.resize(n_components);
  for (Eigen::Index i = 0; i < c; ++i) {
    const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - i;
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index pivot = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(pivot))) pivot = j;
    }
    if (v(pivot) < 0) v = -v;
    out.components.row(i) = v.transpose();
    out.explained_variance[static_cast<std::size_t>(i)] =
        std::max(0.0, solver.eigenvalues()(col));
  }
  out.projections = centered * out.components.transpose();
  return out;
}

}  // namespace peloton
