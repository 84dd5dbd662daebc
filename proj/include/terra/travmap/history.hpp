#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "terra/sgp/sgp.hpp"
#include "terra/travmap/fusion.hpp"
#include "terra/travmap/trav_grid.hpp"

namespace terra {

/// World-anchored square window of fused cells that follows the robot.
/// Cells that leave the window are dropped; re-entering cells start unobserved.
class HistoryBuffer {
 public:
  HistoryBuffer(double resolution, double extent);

  /// Moves the window so it is centered (to the nearest cell) on (x, y).
  void recenter(double x, double y);

  const TravGrid& grid() const { return grid_; }
  TravGrid& grid() { return grid_; }
  double resolution() const { return resolution_; }
  double extent() const { return extent_; }
  bool has_frames() const { return last_t_.has_value(); }
  std::optional<double> last_time() const { return last_t_; }
  void set_last_time(double t) { last_t_ = t; }

 private:
  double resolution_;
  double extent_;
  int cells_per_side_;
  TravGrid grid_;
  bool placed_ = false;
  std::optional<double> last_t_;
};

/// One frame of map maintenance: preliminary scores from (kappa*, grad*,
/// slope), fusion into the history with variances normalized by the prior
/// predictive variance, then smoothing. Returns the smoothed window. The
/// window is recentered on `center` (the robot position) when given, else on
/// the test grid's center.
TravGrid update_map(HistoryBuffer& history, const Prediction& pred, const TestGrid& grid, double t,
                    const FusionParams& params, double prior_variance,
                    std::optional<std::array<double, 2>> center = std::nullopt);

/// Preliminary score layer for a prediction (unfused, unsmoothed). Only
/// active cells are observed.
TravGrid preliminary_map(const Prediction& pred, const TestGrid& grid, double t, const FusionParams& params,
                         double prior_variance);

}  // namespace terra
