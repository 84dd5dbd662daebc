#include "terra/features/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "terra/common/error.hpp"

namespace terra {

PcaTransform fit_pca(std::span<const Vector4> rows) {
  if (rows.size() < 2) throw Error(ErrorCode::degenerate_data, "PCA needs at least 2 rows");
  PcaTransform t;
  t.mean.setZero();
  for (const auto& r : rows) t.mean += r;
  t.mean /= static_cast<double>(rows.size());

  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (const auto& r : rows) {
    const Vector4 d = r - t.mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(rows.size() - 1);
  if (cov.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorCode::degenerate_data, "PCA rows are all identical");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(cov);
  // Eigenvalues at rounding level of the largest one are exact zeros.
  const double floor = 1e-14 * solver.eigenvalues()[3];
  // Eigen returns ascending eigenvalues; reorder to descending.
  for (int j = 0; j < 4; ++j) {
    const int src = 3 - j;
    Vector4 col = solver.eigenvectors().col(src);
    Eigen::Index arg;
    col.cwiseAbs().maxCoeff(&arg);
    if (col[arg] < 0.0) col = -col;
    t.basis.col(j) = col;
    const double lambda = solver.eigenvalues()[src];
    t.scales[j] = lambda <= floor ? 0.0 : std::sqrt(lambda);
  }
  return t;
}

Vector4 apply_pca(const PcaTransform& t, const Vector4& x, double eps) {
  Vector4 y = t.basis.transpose() * (x - t.mean);
  for (int j = 0; j < 4; ++j) y[j] /= std::max(t.scales[j], eps);
  return y;
}

Vector4 invert_pca(const PcaTransform& t, const Vector4& whitened) {
  return t.mean + t.basis * whitened.cwiseProduct(t.scales);
}

}  // namespace terra
