#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>

namespace terra {

/// Axis-aligned uniform 2-D grid. Cells are row-major: index = iy * nx + ix,
/// cell (ix, iy) spans [origin + i * resolution, origin + (i + 1) * resolution).
struct GridGeometry {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.2;
  int nx = 0;
  int ny = 0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  double center_x(int ix) const { return origin_x + (ix + 0.5) * resolution; }
  double center_y(int iy) const { return origin_y + (iy + 0.5) * resolution; }
  bool contains(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx && iy < ny; }

  /// Cell containing (x, y), if any.
  std::optional<std::pair<int, int>> cell_of(double x, double y) const {
    const int ix = static_cast<int>(std::floor((x - origin_x) / resolution));
    const int iy = static_cast<int>(std::floor((y - origin_y) / resolution));
    if (!contains(ix, iy)) return std::nullopt;
    return std::pair{ix, iy};
  }

  /// Integer lattice coordinate of the cell origin, valid when the origin is a
  /// multiple of the resolution (world-anchored grids).
  std::int64_t lattice_x() const { return std::llround(origin_x / resolution); }
  std::int64_t lattice_y() const { return std::llround(origin_y / resolution); }

  bool same_as(const GridGeometry& o, double tol = 1e-9) const {
    return nx == o.nx && ny == o.ny && std::abs(resolution - o.resolution) <= tol &&
           std::abs(origin_x - o.origin_x) <= tol && std::abs(origin_y - o.origin_y) <= tol;
  }
};

/// Grid covering the square [x0, x0 + extent] x [y0, y0 + extent].
inline GridGeometry square_grid(double x0, double y0, double extent, double resolution) {
  GridGeometry g;
  g.origin_x = x0;
  g.origin_y = y0;
  g.resolution = resolution;
  g.nx = static_cast<int>(std::llround(extent / resolution));
  g.ny = g.nx;
  return g;
}

}  // namespace terra
