#include "terra/eval/elevation_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terra/common/error.hpp"
#include "terra/sgp/sgp.hpp"

namespace terra {

ElevationMap::ElevationMap(const GridGeometry& geometry)
    : geometry_(geometry), count_(geometry.size(), 0), mean_(geometry.size(), 0.0), m2_(geometry.size(), 0.0) {}

void ElevationMap::insert(const PointCloud& cloud) {
  for (const auto& p : cloud.points) {
    const auto cell = geometry_.cell_of(p.x(), p.y());
    if (!cell) continue;
    const std::size_t c = geometry_.index(cell->first, cell->second);
    // Welford update
    const double n = static_cast<double>(++count_[c]);
    const double d = p.z() - mean_[c];
    mean_[c] += d / n;
    m2_[c] += d * (p.z() - mean_[c]);
  }
}

double ElevationMap::height(std::size_t cell) const {
  return count_[cell] ? mean_[cell] : std::numeric_limits<double>::quiet_NaN();
}

double ElevationMap::roughness(std::size_t cell) const {
  return count_[cell] ? std::sqrt(m2_[cell] / static_cast<double>(count_[cell])) : 0.0;
}

TravGrid ElevationMap::render(const FusionParams& params, const std::vector<std::uint8_t>* window) const {
  params.validate();
  const auto& g = geometry_;
  TravGrid out(g);
  std::vector<std::uint8_t> seen(g.size());
  std::vector<double> h(g.size(), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) {
    seen[c] = count_[c] > 0;
    h[c] = mean_[c];
  }
  std::vector<double> slope(g.size(), 0.0);
  if (g.nx >= 2 && g.ny >= 2) slope = slope_field(h, seen, g);

  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t c = g.index(ix, iy);
      if (!seen[c] || (window && !(*window)[c])) continue;
      double step = 0.0;
      int neighbors = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx == 0 && dy == 0) || !g.contains(ix + dx, iy + dy)) continue;
          const std::size_t n = g.index(ix + dx, iy + dy);
          if (!seen[n]) continue;
          step += std::abs(h[n] - h[c]);
          ++neighbors;
        }
      }
      if (neighbors) step /= neighbors;
      const double rough = std::min(roughness(c) / params.g_max, 1.0);
      const double steps = std::min(step / params.g_max, 1.0);
      const double s = std::min(slope[c] / params.slope_max, 1.0);
      out.cells[c] = {std::clamp(params.w_kappa * rough + params.w_g * steps + params.w_grad * s, 0.0, 1.0), 0.0,
                      0.0, true};
    }
  }
  return out;
}

TravGrid elevation_map_baseline(std::span<const PointCloud> frames, const GridGeometry& geometry,
                                const FusionParams& params) {
  ElevationMap em(geometry);
  bool any = false;
  for (const auto& f : frames) {
    any = any || !f.empty();
    em.insert(f);
  }
  if (!any) throw Error(ErrorCode::empty_cloud, "elevation map needs at least one non-empty frame");
  return em.render(params);
}

}  // namespace terra
