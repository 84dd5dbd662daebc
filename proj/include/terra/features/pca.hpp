#pragma once

#include <Eigen/Core>
#include <span>

namespace terra {

using Vector4 = Eigen::Vector4d;

/// Whitening transform for the 4-D (x, y, kappa, grad) SGP inputs.
struct PcaTransform {
  Vector4 mean = Vector4::Zero();
  /// Orthonormal columns ordered by descending explained variance. The
  /// largest-magnitude entry of each column is positive.
  Eigen::Matrix4d basis = Eigen::Matrix4d::Identity();
  /// Standard deviation along each principal axis.
  Vector4 scales = Vector4::Ones();

  static PcaTransform identity() { return {}; }
};

/// Requires at least two rows that are not all identical.
PcaTransform fit_pca(std::span<const Vector4> rows);

/// basis^T (x - mean) / max(scale, eps), per axis.
Vector4 apply_pca(const PcaTransform& t, const Vector4& x, double eps = 1e-12);

/// Inverse of apply_pca for axes with positive scale.
Vector4 invert_pca(const PcaTransform& t, const Vector4& whitened);

}  // namespace terra
