#pragma once

#include <span>
#include <vector>

#include "terra/cloud/point_cloud.hpp"

namespace terra {

/// Indices of the retained points: one per occupied voxel of edge v, the one
/// nearest the voxel centroid (ties: lowest index), ordered by ascending
/// voxel key (kx, ky, kz).
std::vector<std::size_t> voxel_downsample_indices(std::span<const Point3> points, double v);

PointCloud voxel_downsample(const PointCloud& cloud, double v);

/// Points whose horizontal distance to center is <= radius, order preserved.
/// Vertical extent is unbounded.
PointCloud crop_radius(const PointCloud& cloud, const Point3& center, double radius);

}  // namespace terra
