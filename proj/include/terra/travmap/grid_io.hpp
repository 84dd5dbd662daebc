#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "terra/common/grid_geometry.hpp"
#include "terra/sgp/sgp.hpp"
#include "terra/travmap/trav_grid.hpp"

namespace terra {

/// Named f32 layers over one grid geometry, in insertion order.
struct LayeredGrid {
  GridGeometry geometry;
  std::vector<std::pair<std::string, std::vector<float>>> layers;

  const std::vector<float>* find(const std::string& name) const;
  void add(std::string name, std::vector<float> values);
};

/// .tgrid: ASCII lines "origin_x origin_y", "resolution", "nx ny", then per
/// layer a line "layer <name>" followed by nx*ny little-endian f32 values.
void write_tgrid(const LayeredGrid& grid, const std::filesystem::path& path);
LayeredGrid read_tgrid(const std::filesystem::path& path);

/// Layers score, variance, timestamp, observed (0/1). Unobserved scores are NaN.
LayeredGrid to_layers(const TravGrid& grid);
TravGrid from_layers(const LayeredGrid& layers);

/// Layers mean, variance, slope, kappa, grad.
LayeredGrid to_layers(const Prediction& pred, const TestGrid& grid);

struct PgmExport {
  double lo = 0.0, hi = 1.0;  // value range mapped to white..black
};

/// 16-bit binary PGM: lo maps to white (65535), hi to black (0); cells with
/// mask == 0 are mid-gray. A "# range lo hi" comment records the mapping and a
/// sidecar 8-bit mask image (<path>.mask.pgm) marks valid cells.
void write_pgm16(const std::vector<float>& values, const std::vector<std::uint8_t>& mask, const GridGeometry& g,
                 const PgmExport& range, const std::filesystem::path& path);

struct PgmImage {
  int width = 0, height = 0;
  std::vector<std::uint16_t> pixels;  // row-major, top row first
  PgmExport range;
};

PgmImage read_pgm16(const std::filesystem::path& path);

/// Recovers layer values from a 16-bit export (row order as in the grid).
std::vector<float> decode_pgm16(const PgmImage& image);

}  // namespace terra
