#pragma once

#include <limits>
#include <vector>

#include "terra/common/grid_geometry.hpp"

namespace terra {

struct TravCell {
  double score = std::numeric_limits<double>::quiet_NaN();  // [0, 1], NaN when unobserved
  double variance = 0.0;                                    // dimensionless
  double timestamp = 0.0;                                   // seconds
  bool observed = false;
};

struct TravGrid {
  GridGeometry geometry;
  std::vector<TravCell> cells;

  TravGrid() = default;
  explicit TravGrid(const GridGeometry& g) : geometry(g), cells(g.size()) {}

  TravCell& at(int ix, int iy) { return cells[geometry.index(ix, iy)]; }
  const TravCell& at(int ix, int iy) const { return cells[geometry.index(ix, iy)]; }
  std::size_t observed_count() const;
};

/// Copies the observed cells of src into a grid with geometry dst whose
/// lattice is aligned with src (same resolution, origins on the same lattice).
TravGrid resample_aligned(const TravGrid& src, const GridGeometry& dst);

}  // namespace terra
