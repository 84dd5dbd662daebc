#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "terra/eval/metrics.hpp"
#include "terra/eval/scan.hpp"
#include "terra/features/features.hpp"
#include "terra/sgp/kernel.hpp"
#include "terra/synth/terrain.hpp"
#include "terra/travmap/fusion.hpp"

namespace terra {

enum class Method { sgp_baseline, fsgp, fsgp_bgk, em, fsgp_accum };

std::string_view to_string(Method m);
/// Throws Error(invalid_argument) listing the valid methods.
Method parse_method(std::string_view name);

struct MethodConfig {
  Method method = Method::fsgp_bgk;
  FeatureParams features;
  KernelParams kernel;               // whitened-feature inputs
  double baseline_lengthscale = 1.0; // meters, planar baseline inputs
  std::size_t m_ind = 125;
  double resolution = 0.2;           // meters
  int k_nearest = 8;                 // IDW neighbors
  double idw_eps = 1e-6;             // meters
  int hyper_iters = 0;               // 0 keeps the configured kernel
  FusionParams fusion;
  double sensor_radius = 8.0;        // meters
  double occlusion_frac = 0.15;
  double window_extent = 20.0;       // meters

  void validate() const;
};

struct MethodRun {
  std::vector<TravGrid> maps;              // per reported frame, in ground-truth geometry
  std::vector<std::size_t> input_points;   // per reported frame
  EvalReport report;
};

/// Runs one method over the frames in order. Frames with empty clouds are
/// skipped and logged. Runtime covers the whole per-frame pipeline.
MethodRun run_method(const MethodConfig& cfg, std::span<const ScanFrame> frames, const GroundTruth& gt);

/// Square window of `extent` meters centered (to the nearest cell) on (x, y),
/// anchored on the world lattice of the given resolution.
GridGeometry window_geometry(double x, double y, double extent, double resolution);

}  // namespace terra
