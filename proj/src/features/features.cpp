#include "terra/features/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "terra/cloud/filters.hpp"
#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"

namespace terra {

void FeatureParams::validate() const {
  if (k < 3) throw Error(ErrorCode::config, fmt::format("features.k: must be >= 3, got {}", k));
  if (!(eps > 0.0)) throw Error(ErrorCode::config, "features.eps: must be > 0");
  if (!(voxel > 0.0)) throw Error(ErrorCode::config, "features.voxel: must be > 0");
  if (max_points < 1) throw Error(ErrorCode::config, "features.max_points: must be >= 1");
  if (!(tau_kappa >= 0.0)) throw Error(ErrorCode::config, "features.tau_kappa: must be >= 0");
  if (!(tau_g >= 0.0)) throw Error(ErrorCode::config, "features.tau_g: must be >= 0");
}

namespace {

void require_points(const PointCloud& cloud, int k) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, fmt::format("neighborhood size must be >= 2, got {}", k));
  if (cloud.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::insufficient_points,
                fmt::format("neighborhood of {} points requested from a cloud of {}", k, cloud.size()));
  }
}

NeighborhoodStats stats_of(const PointCloud& cloud, std::span<const Neighbor> nbrs) {
  NeighborhoodStats s;
  s.centroid = Point3::Zero();
  for (const auto& n : nbrs) s.centroid += cloud.points[n.id];
  s.centroid /= static_cast<double>(nbrs.size());
  s.covariance.setZero();
  for (const auto& n : nbrs) {
    const Point3 d = cloud.points[n.id] - s.centroid;
    s.covariance.noalias() += d * d.transpose();
  }
  s.covariance /= static_cast<double>(nbrs.size() - 1);
  return s;
}

double gradient_of(const PointCloud& cloud, std::size_t i, std::span<const Neighbor> nbrs) {
  double sum = 0.0;
  for (const auto& n : nbrs) sum += std::abs(cloud.points[n.id].z() - cloud.points[i].z());
  return sum / static_cast<double>(nbrs.size());
}

}  // namespace

NeighborhoodStats neighborhood_stats(const PointCloud& cloud, const SpatialIndex& index, std::size_t i, int k) {
  require_points(cloud, k);
  const auto nbrs = knn(index, cloud.points[i], static_cast<std::size_t>(k));
  return stats_of(cloud, nbrs);
}

Eigen::Vector3d symmetric_eigenvalues(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double curvature(const Eigen::Matrix3d& covariance, double eps) {
  Eigen::Vector3d lambda = symmetric_eigenvalues(covariance);
  for (int j = 0; j < 3; ++j) {
    if (lambda[j] < 0.0) {
      if (lambda[j] <= -1e-10) {
        throw Error(ErrorCode::internal, fmt::format("covariance has negative eigenvalue {:.3e}", lambda[j]));
      }
      lambda[j] = 0.0;
    }
  }
  const double denom = lambda.sum() + eps;
  if (denom <= 0.0) return 0.0;
  return lambda.minCoeff() / denom;
}

double gradient(const PointCloud& cloud, const SpatialIndex& index, std::size_t i, int k) {
  require_points(cloud, k);
  const auto nbrs = knn(index, cloud.points[i], static_cast<std::size_t>(k));
  return gradient_of(cloud, i, nbrs);
}

std::vector<PointFeature> compute_point_features(const PointCloud& cloud, const SpatialIndex& index, int k,
                                                 double eps) {
  require_points(cloud, k);
  std::vector<PointFeature> out(cloud.size());
  parallel_for(cloud.size(), [&](std::size_t i) {
    thread_local std::vector<Neighbor> nbrs;
    const auto& p = cloud.points[i];
    index.knn({p.x(), p.y(), p.z()}, static_cast<std::size_t>(k), nbrs);
    const auto stats = stats_of(cloud, nbrs);
    out[i].kappa = curvature(stats.covariance, eps);
    out[i].grad = gradient_of(cloud, i, nbrs);
  });
  return out;
}

FeatureCloud extract_features(const PointCloud& cloud, const FeatureParams& params) {
  params.validate();
  if (cloud.empty()) throw Error(ErrorCode::empty_cloud, "cannot extract features from an empty cloud");

  const SpatialIndex index = build_index(cloud);
  const auto feats = compute_point_features(cloud, index, params.k, params.eps);

  std::vector<std::size_t> selected;  // feature set F first, then D
  std::vector<Point3> rest;
  std::vector<std::size_t> rest_ids;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (feats[i].kappa > params.tau_kappa || feats[i].grad > params.tau_g) {
      selected.push_back(i);
    } else {
      rest.push_back(cloud.points[i]);
      rest_ids.push_back(i);
    }
  }
  for (std::size_t j : voxel_downsample_indices(rest, params.voxel)) selected.push_back(rest_ids[j]);

  if (selected.size() > params.max_points) {
    // Partial Fisher-Yates: the first max_points slots become a uniform sample.
    Rng rng(mix_seed(params.rng_seed));
    for (std::size_t i = 0; i < params.max_points; ++i) {
      const std::size_t j = i + uniform_index(rng, selected.size() - i);
      std::swap(selected[i], selected[j]);
    }
    selected.resize(params.max_points);
  }
  std::sort(selected.begin(), selected.end());

  FeatureCloud fc;
  fc.source_timestamp = cloud.timestamp;
  fc.points.reserve(selected.size());
  for (std::size_t i : selected) {
    const auto& p = cloud.points[i];
    fc.points.push_back({p.x(), p.y(), p.z(), feats[i].kappa, feats[i].grad});
  }
  return fc;
}

}  // namespace terra
