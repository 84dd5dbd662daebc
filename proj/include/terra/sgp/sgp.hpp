#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "terra/features/features.hpp"
#include "terra/sgp/kernel.hpp"
#include "terra/sgp/test_grid.hpp"

namespace terra {

struct TrainSet {
  std::vector<Vector4> inputs;
  std::vector<double> targets;  // centered elevations
  double target_mean = 0.0;

  std::size_t size() const { return inputs.size(); }
};

TrainSet make_train_set(const FeatureCloud& fc, const InputEncoder& encoder);

/// Farthest-point sampling in (x, y), seeded at the point nearest the
/// centroid. Returns every index when m_ind >= |fc|.
std::vector<std::size_t> select_inducing(const FeatureCloud& fc, std::size_t m_ind);

struct SgpModel {
  std::vector<Vector4> inducing;
  Eigen::MatrixXd chol;    // lower factor of K_MM + (noise + jitter) I
  Eigen::VectorXd alpha;   // (K_MM + (noise + jitter) I)^-1 z_M
  Eigen::VectorXd z_m;     // centered inducing targets
  KernelParams params;
  InputEncoder encoder;
  double target_mean = 0.0;
};

/// Lower Cholesky factor; throws NotPositiveDefinite with the failing pivot.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a);

SgpModel train(const TrainSet& ts, std::span<const std::size_t> inducing_ids, const KernelParams& params);

/// Retries with jitter x10 (up to 1e-2) on factorization failure.
SgpModel train_with_retry(const TrainSet& ts, std::span<const std::size_t> inducing_ids, KernelParams params);

struct Prediction {
  GridGeometry geometry;
  std::vector<std::uint8_t> active;
  std::vector<double> mean;      // meters
  std::vector<double> variance;  // meters^2, clamped at 0
  std::vector<double> slope;     // |grad f*|, rise over run

  std::size_t size() const { return geometry.size(); }
};

/// Subset-of-regressors predictive mean and variance over the active cells,
/// followed by the finite-difference slope field.
Prediction predict(const SgpModel& model, const TestGrid& grid);

/// Central differences on interior cells, one-sided at borders and next to
/// inactive cells. Requires nx, ny >= 2.
std::vector<double> slope_field(std::span<const double> values, std::span<const std::uint8_t> active,
                                const GridGeometry& geometry);
std::vector<double> slope_field(std::span<const double> values, const GridGeometry& geometry);

/// Exact GP log marginal likelihood with noise + jitter on the diagonal.
double log_marginal_likelihood(std::span<const Vector4> inputs, std::span<const double> targets,
                               const KernelParams& params);

/// Multi-start coordinate ascent over log-parameters on a seeded subsample of
/// at most 256 points. max_iters == 0 returns init.
KernelParams fit_hyperparameters(const TrainSet& ts, const KernelParams& init, int max_iters,
                                 std::uint64_t seed = 0);

}  // namespace terra
