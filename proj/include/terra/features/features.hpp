#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "terra/cloud/kdtree.hpp"
#include "terra/cloud/point_cloud.hpp"

namespace terra {

struct FeaturePoint {
  double x = 0.0, y = 0.0, z = 0.0;
  double kappa = 0.0;  // dimensionless, [0, 1/3]
  double grad = 0.0;   // meters, mean |dz| over the neighborhood
};

struct FeatureCloud {
  std::vector<FeaturePoint> points;
  double source_timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct FeatureParams {
  int k = 10;
  double eps = 1e-8;
  double tau_kappa = 0.03;
  double tau_g = 0.05;  // meters
  double voxel = 0.2;   // meters
  std::size_t max_points = 1500;
  std::uint64_t rng_seed = 0;

  /// Throws Error(config) naming the offending field.
  void validate() const;
};

struct NeighborhoodStats {
  Point3 centroid;
  Eigen::Matrix3d covariance;
};

/// Per-point curvature and gradient.
struct PointFeature {
  double kappa = 0.0;
  double grad = 0.0;
};

/// Centroid and sample covariance (1/(k-1) normalization) of the k nearest
/// neighbors of point i, which include the point itself.
NeighborhoodStats neighborhood_stats(const PointCloud& cloud, const SpatialIndex& index, std::size_t i, int k);

/// lambda_min / (sum of eigenvalues + eps). Eigenvalues in (-1e-10, 0) are
/// clamped to zero; anything more negative is an internal error.
double curvature(const Eigen::Matrix3d& covariance, double eps);

/// Eigenvalues of a symmetric 3x3 matrix, ascending.
Eigen::Vector3d symmetric_eigenvalues(const Eigen::Matrix3d& m);

/// Mean |z_j - z_i| over the k nearest neighbors of point i.
double gradient(const PointCloud& cloud, const SpatialIndex& index, std::size_t i, int k);

/// Curvature and gradient for every point; data-parallel over points.
std::vector<PointFeature> compute_point_features(const PointCloud& cloud, const SpatialIndex& index, int k,
                                                 double eps);

/// Threshold-passing feature points plus a voxel-downsampled remainder, capped
/// at params.max_points by seeded uniform sampling. Output keeps input order.
FeatureCloud extract_features(const PointCloud& cloud, const FeatureParams& params);

}  // namespace terra
