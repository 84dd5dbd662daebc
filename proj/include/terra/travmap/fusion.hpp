#pragma once

#include "terra/sgp/sgp.hpp"
#include "terra/travmap/trav_grid.hpp"

namespace terra {

struct FusionParams {
  double w_kappa = 0.3;
  double w_g = 0.3;
  double w_grad = 0.4;
  double lambda = 0.2;  // 1/s
  double eps = 1e-3;
  double sigma_smooth = 0.3;  // meters
  int smooth_radius = 2;      // cells
  double kappa_max = 1.0 / 3.0;
  double g_max = 0.3;        // meters
  double slope_max = 0.57735026918962573;  // tan 30 deg

  void validate() const;
};

/// Weighted sum of the capped, normalized curvature, gradient and slope.
double preliminary_score(double kappa, double grad, double slope, const FusionParams& params);

/// Recursive fusion of one cell with new evidence (score, variance) at time t.
TravCell bgk_fuse(const TravCell& prior, double score, double variance, double t, const FusionParams& params);

/// Normalized Gaussian-weighted average over observed neighbors within
/// params.smooth_radius cells. Unobserved cells stay unobserved.
TravGrid gaussian_smooth(const TravGrid& grid, const FusionParams& params);

}  // namespace terra
