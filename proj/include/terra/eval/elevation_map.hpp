#pragma once

#include <span>
#include <vector>

#include "terra/cloud/point_cloud.hpp"
#include "terra/travmap/fusion.hpp"
#include "terra/travmap/trav_grid.hpp"

namespace terra {

/// Per-cell running height statistics over every point ever inserted.
class ElevationMap {
 public:
  explicit ElevationMap(const GridGeometry& geometry);

  void insert(const PointCloud& cloud);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t count(std::size_t cell) const { return count_[cell]; }
  double height(std::size_t cell) const;     // mean z, NaN when empty
  double roughness(std::size_t cell) const;  // population std of z

  /// Score = weighted capped roughness, mean absolute height step to the
  /// observed 8-neighbors, and finite-difference slope. Cells without points
  /// stay unobserved; `window` (when given) restricts the output cells.
  TravGrid render(const FusionParams& params, const std::vector<std::uint8_t>* window = nullptr) const;

 private:
  GridGeometry geometry_;
  std::vector<std::size_t> count_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

TravGrid elevation_map_baseline(std::span<const PointCloud> frames, const GridGeometry& geometry,
                                const FusionParams& params);

}  // namespace terra
