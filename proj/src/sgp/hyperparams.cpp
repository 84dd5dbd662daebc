#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/sgp/sgp.hpp"

namespace terra {

double log_marginal_likelihood(std::span<const Vector4> inputs, std::span<const double> targets,
                               const KernelParams& params) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(params, inputs[i], inputs[j]);
    k(i, i) += params.noise + params.jitter;
  }
  const Eigen::MatrixXd l = cholesky(k);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
  const Eigen::VectorXd v = l.triangularView<Eigen::Lower>().solve(y);
  return -0.5 * v.squaredNorm() - l.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

namespace {

// theta = log(variance, l0..l3, noise)
using Theta = std::array<double, 6>;
constexpr double kMinLogNoise = -18.0;

Theta to_theta(const KernelParams& p) {
  return {std::log(p.variance),        std::log(p.lengthscales[0]), std::log(p.lengthscales[1]),
          std::log(p.lengthscales[2]), std::log(p.lengthscales[3]), std::log(std::max(p.noise, 1e-8))};
}

KernelParams from_theta(const Theta& t, double jitter) {
  KernelParams p;
  p.variance = std::exp(t[0]);
  for (int d = 0; d < 4; ++d) p.lengthscales[d] = std::exp(t[1 + d]);
  p.noise = std::exp(t[5]);
  p.jitter = jitter;
  return p;
}

}  // namespace

KernelParams fit_hyperparameters(const TrainSet& ts, const KernelParams& init, int max_iters, std::uint64_t seed) {
  if (max_iters <= 0 || ts.size() < 2) return init;
  init.validate();

  std::vector<std::size_t> ids(ts.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  constexpr std::size_t kMaxSubsample = 256;
  if (ids.size() > kMaxSubsample) {
    Rng rng(mix_seed(seed, 0x4c4d4cULL));
    for (std::size_t i = 0; i < kMaxSubsample; ++i) std::swap(ids[i], ids[i + uniform_index(rng, ids.size() - i)]);
    ids.resize(kMaxSubsample);
  }
  std::vector<Vector4> x;
  std::vector<double> y;
  double mean = 0.0;
  for (std::size_t i : ids) mean += ts.targets[i];
  mean /= static_cast<double>(ids.size());
  for (std::size_t i : ids) {
    x.push_back(ts.inputs[i]);
    y.push_back(ts.targets[i] - mean);
  }

  auto objective = [&](const Theta& t) {
    try {
      return log_marginal_likelihood(x, y, from_theta(t, init.jitter));
    } catch (const NotPositiveDefinite&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  // Starts: the initial guess plus shorter / longer lengthscales and a
  // noise-dominated hypothesis.
  const Theta base = to_theta(init);
  std::vector<Theta> starts{base, base, base, base};
  for (int d = 1; d <= 4; ++d) {
    starts[1][d] -= std::log(4.0);
    starts[2][d] += std::log(4.0);
  }
  starts[3][5] = std::log(std::max(init.variance, 1e-6));

  Theta best = base;
  double best_value = objective(base);
  for (Theta t : starts) {
    double value = objective(t);
    double step = 1.0;
    for (int it = 0; it < max_iters && step > 1e-3; ++it) {
      bool improved = false;
      for (std::size_t c = 0; c < t.size(); ++c) {
        for (double dir : {+1.0, -1.0}) {
          Theta cand = t;
          cand[c] += dir * step;
          if (c == 5 && cand[c] < kMinLogNoise) cand[c] = kMinLogNoise;
          const double v = objective(cand);
          if (v > value) {
            value = v;
            t = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (value > best_value) {
      best_value = value;
      best = t;
    }
  }
  return from_theta(best, init.jitter);
}

}  // namespace terra
