#include "terra/travmap/history.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"

namespace terra {

HistoryBuffer::HistoryBuffer(double resolution, double extent)
    : resolution_(resolution), extent_(extent) {
  if (!(resolution > 0.0) || !(extent > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "history window needs positive resolution and extent");
  }
  cells_per_side_ = std::max(1, static_cast<int>(std::llround(extent / resolution)));
  GridGeometry g;
  g.resolution = resolution;
  g.nx = g.ny = cells_per_side_;
  grid_ = TravGrid(g);
}

void HistoryBuffer::recenter(double x, double y) {
  GridGeometry g = grid_.geometry;
  const auto lx = std::llround(x / resolution_) - cells_per_side_ / 2;
  const auto ly = std::llround(y / resolution_) - cells_per_side_ / 2;
  g.origin_x = static_cast<double>(lx) * resolution_;
  g.origin_y = static_cast<double>(ly) * resolution_;
  if (placed_ && g.lattice_x() == grid_.geometry.lattice_x() && g.lattice_y() == grid_.geometry.lattice_y()) return;
  grid_ = placed_ ? resample_aligned(grid_, g) : TravGrid(g);
  placed_ = true;
}

namespace {

void check_alignment(const Prediction& pred, const TestGrid& grid) {
  if (!pred.geometry.same_as(grid.geometry) || pred.mean.size() != grid.size() ||
      pred.slope.size() != grid.size() || pred.variance.size() != grid.size()) {
    throw Error(ErrorCode::dimension_mismatch, "prediction and test grid dimensions differ");
  }
}

}  // namespace

TravGrid preliminary_map(const Prediction& pred, const TestGrid& grid, double t, const FusionParams& params,
                         double prior_variance) {
  check_alignment(pred, grid);
  TravGrid out(grid.geometry);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (!grid.active[c]) continue;
    out.cells[c].score = preliminary_score(grid.kappa[c], grid.grad[c], pred.slope[c], params);
    out.cells[c].variance = std::clamp(pred.variance[c] / prior_variance, 0.0, 1.0);
    out.cells[c].timestamp = t;
    out.cells[c].observed = true;
  }
  return out;
}

TravGrid update_map(HistoryBuffer& history, const Prediction& pred, const TestGrid& grid, double t,
                    const FusionParams& params, double prior_variance,
                    std::optional<std::array<double, 2>> center) {
  params.validate();
  check_alignment(pred, grid);
  if (std::abs(grid.geometry.resolution - history.resolution()) > 1e-12) {
    throw Error(ErrorCode::dimension_mismatch, "test grid resolution differs from the history window");
  }
  if (history.last_time() && t < *history.last_time()) {
    throw Error(ErrorCode::time_regression, fmt::format("frame time {} precedes {}", t, *history.last_time()));
  }

  const TravGrid pre = preliminary_map(pred, grid, t, params, prior_variance);
  const auto& tg = grid.geometry;
  if (center) {
    history.recenter((*center)[0], (*center)[1]);
  } else {
    history.recenter(tg.origin_x + 0.5 * tg.nx * tg.resolution, tg.origin_y + 0.5 * tg.ny * tg.resolution);
  }

  TravGrid& hist = history.grid();
  const auto off_x = tg.lattice_x() - hist.geometry.lattice_x();
  const auto off_y = tg.lattice_y() - hist.geometry.lattice_y();
  parallel_for(tg.size(), [&](std::size_t c) {
    const auto& cell = pre.cells[c];
    if (!cell.observed) return;
    const int jx = static_cast<int>(static_cast<long long>(c % static_cast<std::size_t>(tg.nx)) + off_x);
    const int jy = static_cast<int>(static_cast<long long>(c / static_cast<std::size_t>(tg.nx)) + off_y);
    if (!hist.geometry.contains(jx, jy)) return;
    auto& h = hist.at(jx, jy);
    h = bgk_fuse(h, cell.score, cell.variance, t, params);
  });
  history.set_last_time(t);
  return gaussian_smooth(hist, params);
}

}  // namespace terra
