#include "terra/travmap/trav_grid.hpp"

#include <cmath>

#include "terra/common/error.hpp"

namespace terra {

std::size_t TravGrid::observed_count() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.observed ? 1 : 0;
  return n;
}

TravGrid resample_aligned(const TravGrid& src, const GridGeometry& dst) {
  if (std::abs(src.geometry.resolution - dst.resolution) > 1e-12) {
    throw Error(ErrorCode::geometry_mismatch, "aligned resampling requires equal resolutions");
  }
  TravGrid out(dst);
  const auto off_x = src.geometry.lattice_x() - dst.lattice_x();
  const auto off_y = src.geometry.lattice_y() - dst.lattice_y();
  for (int iy = 0; iy < src.geometry.ny; ++iy) {
    for (int ix = 0; ix < src.geometry.nx; ++ix) {
      const auto& c = src.at(ix, iy);
      if (!c.observed) continue;
      const auto jx = static_cast<int>(ix + off_x), jy = static_cast<int>(iy + off_y);
      if (dst.contains(jx, jy)) out.at(jx, jy) = c;
    }
  }
  return out;
}

}  // namespace terra
