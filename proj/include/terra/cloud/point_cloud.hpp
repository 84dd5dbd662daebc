#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace terra {

/// Gravity-aligned world coordinates in meters. Inputs are assumed to be
/// pre-aligned with the world horizontal plane.
using Point3 = Eigen::Vector3d;

struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id = "world";
  double timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace terra
