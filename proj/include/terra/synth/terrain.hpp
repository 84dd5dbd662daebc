#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "terra/cloud/point_cloud.hpp"
#include "terra/common/grid_geometry.hpp"
#include "terra/travmap/fusion.hpp"
#include "terra/travmap/trav_grid.hpp"

namespace terra {

enum class TerrainKind { hilly, forest, ruin };

std::string_view to_string(TerrainKind kind);
/// Throws Error(invalid_argument) listing the valid kinds.
TerrainKind parse_terrain_kind(std::string_view name);

struct TerrainSpec {
  TerrainKind kind = TerrainKind::hilly;
  double extent = 20.0;           // square side, meters
  double point_density = 64.0;    // ground points per m^2
  std::uint64_t seed = 0;
  double obstacle_density = 0.05; // obstacles per m^2 (forest, ruin)
  double hill_amplitude = 0.8;    // meters
  double hill_wavelength = 8.0;   // meters, longest octave
  double surface_noise = 0.0;     // meters, std of vertical noise on sampled points
  double resolution = 0.2;        // ground-truth grid, meters

  void validate() const;
};

struct Obstacle {
  enum class Shape { tree, box, cylinder } shape;
  double x, y;           // center
  double size_x, size_y; // radius (tree, cylinder) or half extents (box)
  double height;
};

/// Smooth seeded height function: a sum of 4-8 sinusoidal octaves.
class HeightField {
 public:
  explicit HeightField(const TerrainSpec& spec);
  double operator()(double x, double y) const;
  std::size_t octaves() const { return waves_.size(); }

 private:
  struct Wave {
    double amplitude, kx, ky, phase;
  };
  std::vector<Wave> waves_;
};

struct GroundTruth {
  TerrainSpec spec;
  GridGeometry geometry;
  std::vector<double> height;  // surface elevation at cell centers
  TravGrid oracle;             // traversability of the dense cloud
  std::vector<Obstacle> obstacles;
};

struct Terrain {
  PointCloud cloud;
  GroundTruth truth;
};

struct OracleParams {
  FusionParams fusion;
  int k = 10;
  double eps = 1e-8;
};

Terrain generate_terrain(const TerrainSpec& spec, const OracleParams& oracle = {});

/// Elevation of the generated surface (ground or obstacle top) at (x, y).
using SurfaceFn = std::function<double(double x, double y)>;

/// Scores every cell from the dense, un-occluded cloud: per-point curvature
/// and gradient (exact KNN) averaged per cell, slope by finite differences of
/// the height grid, then the weighted preliminary score. The height grid is
/// `surface` at cell centers when given, else the per-cell mean elevation.
/// Empty cells borrow from the nearest point.
TravGrid ground_truth_map(const PointCloud& cloud, const GridGeometry& geometry, const OracleParams& params,
                          const SurfaceFn& surface = nullptr, std::vector<double>* height_out = nullptr);

/// Ground height plus obstacle tops for a generated terrain.
SurfaceFn terrain_surface(const TerrainSpec& spec, const std::vector<Obstacle>& obstacles);

struct Pose {
  double x = 0.0, y = 0.0, heading = 0.0;
  double t = 0.0;
};

/// Lawnmower sweep with an odd number of lanes, inset 1 m from the bounds,
/// sampled at equal arc length with a fixed time step.
std::vector<Pose> make_trajectory(const TerrainSpec& spec, std::size_t n_poses, double dt = 0.5);

}  // namespace terra
