#include "terra/cloud/kdtree.hpp"

namespace terra {

SpatialIndex build_index(std::span<const Point3> points) {
  std::vector<SpatialIndex::Coord> coords;
  coords.reserve(points.size());
  for (const auto& p : points) coords.push_back({p.x(), p.y(), p.z()});
  return SpatialIndex(std::move(coords));
}

SpatialIndex build_index(const PointCloud& cloud) { return build_index(std::span<const Point3>(cloud.points)); }

PlanarIndex build_planar_index(std::span<const Point3> points) {
  std::vector<PlanarIndex::Coord> coords;
  coords.reserve(points.size());
  for (const auto& p : points) coords.push_back({p.x(), p.y()});
  return PlanarIndex(std::move(coords));
}

}  // namespace terra
