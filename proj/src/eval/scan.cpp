#include "terra/eval/scan.hpp"

#include <cmath>
#include <numbers>

#include "terra/cloud/filters.hpp"
#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"

namespace terra {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> random_partition(Rng& rng, std::size_t n, double total) {
  std::vector<double> parts(n);
  double sum = 0.0;
  for (auto& p : parts) sum += (p = 0.25 + uniform01(rng));
  for (auto& p : parts) p *= total / sum;
  return parts;
}
}  // namespace

std::vector<Sector> occlusion_sectors(double occlusion_frac, std::uint64_t seed) {
  if (!(occlusion_frac >= 0.0 && occlusion_frac <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "occlusion_frac must be in [0, 1]");
  }
  if (occlusion_frac == 0.0) return {};
  if (occlusion_frac == 1.0) return {{0.0, kTwoPi}};
  Rng rng(mix_seed(seed, 0x4f43ULL));
  const std::size_t n = 1 + uniform_index(rng, 4);
  const auto widths = random_partition(rng, n, occlusion_frac * kTwoPi);
  const auto gaps = random_partition(rng, n, (1.0 - occlusion_frac) * kTwoPi);
  double a = uniform(rng, 0.0, kTwoPi);
  std::vector<Sector> sectors;
  for (std::size_t i = 0; i < n; ++i) {
    sectors.push_back({std::fmod(a, kTwoPi), widths[i]});
    a += widths[i] + gaps[i];
  }
  return sectors;
}

ScanFrame simulate_scan(const PointCloud& global, const Pose& pose, double radius, double occlusion_frac,
                        std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "sensor radius must be > 0");
  ScanFrame frame;
  frame.pose = pose;
  frame.t = pose.t;
  PointCloud crop = crop_radius(global, Point3(pose.x, pose.y, 0.0), radius);
  const auto sectors = occlusion_sectors(occlusion_frac, seed);
  frame.cloud.frame_id = global.frame_id;
  frame.cloud.timestamp = pose.t;
  if (sectors.empty()) {
    frame.cloud.points = std::move(crop.points);
    return frame;
  }
  if (occlusion_frac == 1.0) return frame;
  for (const auto& p : crop.points) {
    double bearing = std::atan2(p.y() - pose.y, p.x() - pose.x);
    if (bearing < 0.0) bearing += kTwoPi;
    bool hidden = false;
    for (const auto& s : sectors) {
      double rel = bearing - s.start;
      if (rel < 0.0) rel += kTwoPi;
      hidden = hidden || rel < s.width;
    }
    if (!hidden) frame.cloud.points.push_back(p);
  }
  return frame;
}

std::vector<ScanFrame> simulate_sequence(const PointCloud& global, const std::vector<Pose>& poses, double radius,
                                         double occlusion_frac, std::uint64_t seed) {
  std::vector<ScanFrame> frames;
  frames.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    frames.push_back(simulate_scan(global, poses[i], radius, occlusion_frac, mix_seed(seed, i)));
  }
  return frames;
}

}  // namespace terra
