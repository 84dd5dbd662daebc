#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/cloud/point_cloud.hpp"
#include "terra/synth/terrain.hpp"

namespace terra {

struct ScanFrame {
  Pose pose;
  PointCloud cloud;
  double t = 0.0;
};

/// Occluded angular sector [start, start + width) in radians, start in [0, 2pi).
struct Sector {
  double start, width;
};

/// 1-4 sectors with total width occlusion_frac * 2pi separated by random gaps.
std::vector<Sector> occlusion_sectors(double occlusion_frac, std::uint64_t seed);

/// Horizontal radius crop at the pose, then removal of the points whose
/// bearing from the pose falls in an occluded sector.
ScanFrame simulate_scan(const PointCloud& global, const Pose& pose, double radius, double occlusion_frac,
                        std::uint64_t seed);

std::vector<ScanFrame> simulate_sequence(const PointCloud& global, const std::vector<Pose>& poses, double radius,
                                         double occlusion_frac, std::uint64_t seed);

}  // namespace terra
