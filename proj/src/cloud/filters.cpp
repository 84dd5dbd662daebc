#include "terra/cloud/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "terra/common/error.hpp"

namespace terra {

std::vector<std::size_t> voxel_downsample_indices(std::span<const Point3> points, double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::nonpositive_voxel, fmt::format("voxel size must be > 0, got {}", v));

  using Key = std::array<std::int64_t, 3>;
  struct Entry {
    Key key;
    std::size_t idx;
  };
  std::vector<Entry> entries;
  entries.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    entries.push_back({{static_cast<std::int64_t>(std::floor(p.x() / v)),
                        static_cast<std::int64_t>(std::floor(p.y() / v)),
                        static_cast<std::int64_t>(std::floor(p.z() / v))},
                       i});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.key < b.key || (a.key == b.key && a.idx < b.idx); });

  std::vector<std::size_t> kept;
  for (std::size_t begin = 0; begin < entries.size();) {
    std::size_t end = begin;
    Point3 centroid = Point3::Zero();
    while (end < entries.size() && entries[end].key == entries[begin].key) {
      centroid += points[entries[end].idx];
      ++end;
    }
    centroid /= static_cast<double>(end - begin);
    // Entries within a voxel are index-sorted, so strict < keeps the lowest index on ties.
    std::size_t best = entries[begin].idx;
    double best_d2 = (points[best] - centroid).squaredNorm();
    for (std::size_t j = begin + 1; j < end; ++j) {
      const double d2 = (points[entries[j].idx] - centroid).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = entries[j].idx;
      }
    }
    kept.push_back(best);
    begin = end;
  }
  return kept;
}

PointCloud voxel_downsample(const PointCloud& cloud, double v) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.timestamp = cloud.timestamp;
  for (std::size_t i : voxel_downsample_indices(cloud.points, v)) out.points.push_back(cloud.points[i]);
  return out;
}

PointCloud crop_radius(const PointCloud& cloud, const Point3& center, double radius) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.timestamp = cloud.timestamp;
  const double r2 = radius * radius;
  for (const auto& p : cloud.points) {
    const double dx = p.x() - center.x(), dy = p.y() - center.y();
    if (dx * dx + dy * dy <= r2) out.points.push_back(p);
  }
  return out;
}

}  // namespace terra
