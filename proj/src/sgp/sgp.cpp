#include "terra/sgp/sgp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"

namespace terra {

void KernelParams::validate() const {
  if (!(variance > 0.0)) throw Error(ErrorCode::config, "sgp.kernel.variance: must be > 0");
  for (int d = 0; d < 4; ++d) {
    if (!(lengthscales[d] > 0.0)) {
      throw Error(ErrorCode::config, fmt::format("sgp.kernel.lengthscales[{}]: must be > 0", d));
    }
  }
  if (!(noise >= 0.0)) throw Error(ErrorCode::config, "sgp.kernel.noise: must be >= 0");
  if (!(jitter >= 0.0)) throw Error(ErrorCode::config, "sgp.kernel.jitter: must be >= 0");
}

TrainSet make_train_set(const FeatureCloud& fc, const InputEncoder& encoder) {
  TrainSet ts;
  ts.inputs.reserve(fc.size());
  ts.targets.reserve(fc.size());
  double sum = 0.0;
  for (const auto& p : fc.points) sum += p.z;
  ts.target_mean = fc.empty() ? 0.0 : sum / static_cast<double>(fc.size());
  for (const auto& p : fc.points) {
    ts.inputs.push_back(encoder.encode(p.x, p.y, p.kappa, p.grad));
    ts.targets.push_back(p.z - ts.target_mean);
  }
  return ts;
}

std::vector<std::size_t> select_inducing(const FeatureCloud& fc, std::size_t m_ind) {
  if (fc.empty()) throw Error(ErrorCode::empty_cloud, "cannot select inducing points from an empty cloud");
  if (m_ind < 1) throw Error(ErrorCode::invalid_argument, "inducing count must be >= 1");
  const std::size_t n = fc.size();
  std::vector<std::size_t> ids;
  if (m_ind >= n) {
    ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return ids;
  }
  double cx = 0.0, cy = 0.0;
  for (const auto& p : fc.points) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);

  auto d2 = [&](std::size_t i, double x, double y) {
    const double dx = fc.points[i].x - x, dy = fc.points[i].y - y;
    return dx * dx + dy * dy;
  };
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (d2(i, cx, cy) < d2(first, cx, cy)) first = i;
  }
  ids.reserve(m_ind);
  ids.push_back(first);
  std::vector<double> min_d2(n);
  for (std::size_t i = 0; i < n; ++i) min_d2[i] = d2(i, fc.points[first].x, fc.points[first].y);
  while (ids.size() < m_ind) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (min_d2[i] > min_d2[best]) best = i;
    }
    ids.push_back(best);
    const double bx = fc.points[best].x, by = fc.points[best].y;
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = std::min(min_d2[i], d2(i, bx, by));
  }
  return ids;
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  // Pivots at rounding level of the diagonal are treated as singular.
  const double tol = 1e-14 * std::max(max_diag, std::numeric_limits<double>::min());
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > tol)) throw NotPositiveDefinite(static_cast<std::size_t>(j), pivot);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    if (j + 1 < n) {
      const Eigen::Index m = n - j - 1;
      l.col(j).tail(m) = (a.col(j).tail(m) - l.bottomLeftCorner(m, j) * l.row(j).head(j).transpose()) / ljj;
    }
  }
  return l;
}

SgpModel train(const TrainSet& ts, std::span<const std::size_t> inducing_ids, const KernelParams& params) {
  params.validate();
  if (inducing_ids.empty()) throw Error(ErrorCode::invalid_argument, "at least one inducing point required");
  SgpModel model;
  model.params = params;
  model.target_mean = ts.target_mean;
  const auto m = static_cast<Eigen::Index>(inducing_ids.size());
  model.z_m.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t id = inducing_ids[static_cast<std::size_t>(i)];
    if (id >= ts.size()) throw Error(ErrorCode::invalid_argument, fmt::format("inducing id {} out of range", id));
    model.inducing.push_back(ts.inputs[id]);
    model.z_m[i] = ts.targets[id];
  }
  Eigen::MatrixXd kmm(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      kmm(i, j) = kmm(j, i) = kernel(params, model.inducing[i], model.inducing[j]);
    }
    kmm(i, i) += params.noise + params.jitter;
  }
  model.chol = cholesky(kmm);
  const Eigen::MatrixXd& l = model.chol;
  model.alpha = l.triangularView<Eigen::Lower>().transpose().solve(l.triangularView<Eigen::Lower>().solve(model.z_m));
  return model;
}

SgpModel train_with_retry(const TrainSet& ts, std::span<const std::size_t> inducing_ids, KernelParams params) {
  for (;;) {
    try {
      return train(ts, inducing_ids, params);
    } catch (const NotPositiveDefinite&) {
      const double next = params.jitter > 0.0 ? params.jitter * 10.0 : 1e-8;
      if (next > 1e-2 * (1.0 + 1e-9)) throw;
      params.jitter = next;
    }
  }
}

Prediction predict(const SgpModel& model, const TestGrid& grid) {
  const auto& p = model.params;
  const auto m = static_cast<Eigen::Index>(model.inducing.size());
  Prediction out;
  out.geometry = grid.geometry;
  out.active = grid.active;
  const std::size_t n = grid.size();
  out.mean.assign(n, 0.0);
  out.variance.assign(n, 0.0);

  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < n; ++c) {
    if (grid.active[c]) cells.push_back(c);
  }

  Eigen::MatrixXd z_scaled(4, m);
  for (Eigen::Index j = 0; j < m; ++j) z_scaled.col(j) = model.inducing[j].cwiseQuotient(p.lengthscales);

  // Fixed-size blocks keep every cell's arithmetic independent of worker count.
  constexpr std::size_t kBlock = 128;
  const std::size_t blocks = (cells.size() + kBlock - 1) / kBlock;
  const double k_star_star = p.variance + p.noise;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(cells.size(), begin + kBlock);
    const auto cols = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd k_m_star(m, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Vector4 x = grid.inputs[cells[begin + static_cast<std::size_t>(c)]].cwiseQuotient(p.lengthscales);
      for (Eigen::Index j = 0; j < m; ++j) {
        k_m_star(j, c) = p.variance * std::exp(-0.5 * (z_scaled.col(j) - x).squaredNorm());
      }
    }
    const Eigen::VectorXd mean = k_m_star.transpose() * model.alpha;
    model.chol.triangularView<Eigen::Lower>().solveInPlace(k_m_star);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::size_t cell = cells[begin + static_cast<std::size_t>(c)];
      out.mean[cell] = mean[c] + model.target_mean;
      out.variance[cell] = std::max(0.0, k_star_star - k_m_star.col(c).squaredNorm());
    }
  });

  if (grid.geometry.nx >= 2 && grid.geometry.ny >= 2) {
    out.slope = slope_field(out.mean, out.active, out.geometry);
  } else {
    out.slope.assign(n, 0.0);
  }
  return out;
}

std::vector<double> slope_field(std::span<const double> values, std::span<const std::uint8_t> active,
                                const GridGeometry& g) {
  if (g.nx < 2 || g.ny < 2) {
    throw Error(ErrorCode::grid_too_small, fmt::format("slope needs at least 2x2 cells, got {}x{}", g.nx, g.ny));
  }
  if (values.size() != g.size() || active.size() != g.size()) {
    throw Error(ErrorCode::dimension_mismatch, "slope field input does not match grid size");
  }
  std::vector<double> slope(g.size(), 0.0);
  auto ok = [&](int ix, int iy) { return g.contains(ix, iy) && active[g.index(ix, iy)] != 0; };
  auto derivative = [&](int ix, int iy, int dx, int dy) {
    const bool lo = ok(ix - dx, iy - dy), hi = ok(ix + dx, iy + dy);
    const double c = values[g.index(ix, iy)];
    if (lo && hi) return (values[g.index(ix + dx, iy + dy)] - values[g.index(ix - dx, iy - dy)]) / (2.0 * g.resolution);
    if (hi) return (values[g.index(ix + dx, iy + dy)] - c) / g.resolution;
    if (lo) return (c - values[g.index(ix - dx, iy - dy)]) / g.resolution;
    return 0.0;
  };
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!ok(ix, iy)) continue;
      const double gx = derivative(ix, iy, 1, 0);
      const double gy = derivative(ix, iy, 0, 1);
      slope[g.index(ix, iy)] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return slope;
}

std::vector<double> slope_field(std::span<const double> values, const GridGeometry& geometry) {
  const std::vector<std::uint8_t> all(geometry.size(), 1);
  return slope_field(values, all, geometry);
}

}  // namespace terra
