#include "terra/travmap/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"

namespace terra {

void FusionParams::validate() const {
  if (!(w_kappa >= 0.0 && w_g >= 0.0 && w_grad >= 0.0)) {
    throw Error(ErrorCode::config, "fusion.w_kappa/w_g/w_grad: weights must be nonnegative");
  }
  if (std::abs(w_kappa + w_g + w_grad - 1.0) > 1e-9) {
    throw Error(ErrorCode::config,
                fmt::format("fusion.w_kappa: weights must sum to 1, got {}", w_kappa + w_g + w_grad));
  }
  if (!(lambda >= 0.0)) throw Error(ErrorCode::config, "fusion.lambda: must be >= 0");
  if (!(eps >= 0.0)) throw Error(ErrorCode::config, "fusion.eps: must be >= 0");
  if (!(sigma_smooth > 0.0)) throw Error(ErrorCode::config, "fusion.sigma_smooth: must be > 0");
  if (smooth_radius < 0) throw Error(ErrorCode::config, "fusion.smooth_radius: must be >= 0");
  if (!(kappa_max > 0.0)) throw Error(ErrorCode::config, "fusion.kappa_max: must be > 0");
  if (!(g_max > 0.0)) throw Error(ErrorCode::config, "fusion.g_max: must be > 0");
  if (!(slope_max > 0.0)) throw Error(ErrorCode::config, "fusion.slope_max: must be > 0");
}

double preliminary_score(double kappa, double grad, double slope, const FusionParams& p) {
  const double k = std::min(kappa / p.kappa_max, 1.0);
  const double g = std::min(grad / p.g_max, 1.0);
  const double s = std::min(slope / p.slope_max, 1.0);
  return std::clamp(p.w_kappa * k + p.w_g * g + p.w_grad * s, 0.0, 1.0);
}

TravCell bgk_fuse(const TravCell& prior, double score, double variance, double t, const FusionParams& p) {
  if (!prior.observed) return {score, variance, t, true};
  if (t < prior.timestamp) {
    throw Error(ErrorCode::time_regression,
                fmt::format("fusion time {} precedes the cell's last update {}", t, prior.timestamp));
  }
  const double w_t = std::exp(-p.lambda * (t - prior.timestamp));
  const double w_sigma = 1.0 / (prior.variance + p.eps);
  const double w = w_t * w_sigma;
  TravCell out;
  out.score = (w * prior.score + score) / (w + 1.0);
  out.variance = (w_t * prior.variance + variance) / (w_t + 1.0);
  out.timestamp = t;
  out.observed = true;
  return out;
}

TravGrid gaussian_smooth(const TravGrid& grid, const FusionParams& p) {
  const auto& g = grid.geometry;
  TravGrid out = grid;
  const int r = p.smooth_radius;
  // Kernel weights depend only on the cell offset.
  std::vector<double> weights(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double d2 = (dx * dx + dy * dy) * g.resolution * g.resolution;
      weights[static_cast<std::size_t>((dy + r) * (2 * r + 1) + dx + r)] =
          std::exp(-d2 / (2.0 * p.sigma_smooth * p.sigma_smooth));
    }
  }
  parallel_for(g.size(), [&](std::size_t c) {
    if (!grid.cells[c].observed) return;
    const int ix = static_cast<int>(c % static_cast<std::size_t>(g.nx));
    const int iy = static_cast<int>(c / static_cast<std::size_t>(g.nx));
    double num = 0.0, den = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (!g.contains(ix + dx, iy + dy)) continue;
        const auto& n = grid.at(ix + dx, iy + dy);
        if (!n.observed) continue;
        const double w = weights[static_cast<std::size_t>((dy + r) * (2 * r + 1) + dx + r)];
        num += w * n.score;
        den += w;
      }
    }
    out.cells[c].score = std::clamp(num / den, 0.0, 1.0);
  });
  return out;
}

}  // namespace terra
