#pragma once

#include <cmath>

#include "terra/features/pca.hpp"

namespace terra {

struct KernelParams {
  double variance = 1.0;                     // sigma_f^2, elevation^2
  Vector4 lengthscales = Vector4::Ones();    // per-axis, input units
  double noise = 1e-2;                       // sigma_n^2, elevation^2
  double jitter = 1e-6;

  /// Prior predictive variance k(x, x) + noise.
  double prior_variance() const { return variance + noise; }

  void validate() const;
};

/// Squared-exponential ARD kernel.
inline double kernel(const KernelParams& p, const Vector4& a, const Vector4& b) {
  double s = 0.0;
  for (int d = 0; d < 4; ++d) {
    const double u = (a[d] - b[d]) / p.lengthscales[d];
    s += u * u;
  }
  return p.variance * std::exp(-0.5 * s);
}

}  // namespace terra
