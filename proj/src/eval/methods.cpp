#include "terra/eval/methods.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "terra/cloud/filters.hpp"
#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/eval/elevation_map.hpp"
#include "terra/sgp/sgp.hpp"
#include "terra/travmap/history.hpp"

namespace terra {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::sgp_baseline: return "sgp-baseline";
    case Method::fsgp: return "fsgp";
    case Method::fsgp_bgk: return "fsgp-bgk";
    case Method::em: return "em";
    case Method::fsgp_accum: return "fsgp-accum";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::sgp_baseline, Method::fsgp, Method::fsgp_bgk, Method::em, Method::fsgp_accum}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::invalid_argument,
              fmt::format("unknown method '{}' (valid methods: sgp-baseline, fsgp, fsgp-bgk, em, fsgp-accum)", name));
}

void MethodConfig::validate() const {
  features.validate();
  kernel.validate();
  fusion.validate();
  if (!(baseline_lengthscale > 0.0)) throw Error(ErrorCode::config, "sgp.baseline_lengthscale: must be > 0");
  if (m_ind < 1) throw Error(ErrorCode::config, "sgp.m_ind: must be >= 1");
  if (!(resolution > 0.0)) throw Error(ErrorCode::config, "sgp.resolution: must be > 0");
  if (k_nearest < 1) throw Error(ErrorCode::config, "sgp.k_nearest: must be >= 1");
  if (!(idw_eps > 0.0)) throw Error(ErrorCode::config, "sgp.idw_eps: must be > 0");
  if (hyper_iters < 0) throw Error(ErrorCode::config, "sgp.hyper_iters: must be >= 0");
  if (!(sensor_radius > 0.0)) throw Error(ErrorCode::config, "sensor.radius: must be > 0");
  if (!(occlusion_frac >= 0.0 && occlusion_frac <= 1.0)) {
    throw Error(ErrorCode::config, "sensor.occlusion_frac: must be in [0, 1]");
  }
  if (!(window_extent > 0.0)) throw Error(ErrorCode::config, "map.window_extent: must be > 0");
}

GridGeometry window_geometry(double x, double y, double extent, double resolution) {
  GridGeometry g;
  g.resolution = resolution;
  g.nx = g.ny = std::max(1, static_cast<int>(std::llround(extent / resolution)));
  g.origin_x = static_cast<double>(std::llround(x / resolution) - g.nx / 2) * resolution;
  g.origin_y = static_cast<double>(std::llround(y / resolution) - g.ny / 2) * resolution;
  return g;
}

namespace {

using Clock = std::chrono::steady_clock;

// Plain voxel downsampling with a seeded cap; curvature and gradient left at 0.
FeatureCloud baseline_cloud(const PointCloud& cloud, const FeatureParams& fp, std::uint64_t seed) {
  auto ids = voxel_downsample_indices(cloud.points, fp.voxel);
  if (ids.size() > fp.max_points) {
    Rng rng(mix_seed(seed));
    for (std::size_t i = 0; i < fp.max_points; ++i) {
      std::swap(ids[i], ids[i + uniform_index(rng, ids.size() - i)]);
    }
    ids.resize(fp.max_points);
    std::sort(ids.begin(), ids.end());
  }
  FeatureCloud fc;
  fc.source_timestamp = cloud.timestamp;
  for (auto i : ids) {
    const auto& p = cloud.points[i];
    fc.points.push_back({p.x(), p.y(), p.z(), 0.0, 0.0});
  }
  return fc;
}

class Runner {
 public:
  Runner(const MethodConfig& cfg, const GroundTruth& gt)
      : cfg_(cfg), gt_(gt), history_(cfg.resolution, cfg.window_extent), em_(gt.geometry) {
    if (std::abs(cfg.resolution - gt.geometry.resolution) > 1e-12) {
      throw Error(ErrorCode::geometry_mismatch,
                  fmt::format("method resolution {} differs from ground truth resolution {}", cfg.resolution,
                              gt.geometry.resolution));
    }
  }

  // Returns the frame's map in ground-truth geometry.
  TravGrid step(const ScanFrame& frame, std::size_t index) {
    switch (cfg_.method) {
      case Method::em: return em_step(frame);
      case Method::fsgp_accum: {
        accumulated_.points.insert(accumulated_.points.end(), frame.cloud.points.begin(), frame.cloud.points.end());
        accumulated_.timestamp = frame.t;
        return sgp_step(accumulated_, frame, index);
      }
      default: return sgp_step(frame.cloud, frame, index);
    }
  }

  std::size_t input_size(const ScanFrame& frame) const {
    return cfg_.method == Method::fsgp_accum ? accumulated_.size() : frame.cloud.size();
  }

 private:
  CellFilter visible(const ScanFrame& frame) const {
    const double r2 = cfg_.sensor_radius * cfg_.sensor_radius;
    const double x0 = gt_.geometry.origin_x, y0 = gt_.geometry.origin_y;
    const double x1 = x0 + gt_.geometry.nx * gt_.geometry.resolution;
    const double y1 = y0 + gt_.geometry.ny * gt_.geometry.resolution;
    const double px = frame.pose.x, py = frame.pose.y;
    return [=](double x, double y) {
      const double dx = x - px, dy = y - py;
      return dx * dx + dy * dy <= r2 && x >= x0 && x < x1 && y >= y0 && y < y1;
    };
  }

  TravGrid sgp_step(const PointCloud& cloud, const ScanFrame& frame, std::size_t index) {
    const bool baseline = cfg_.method == Method::sgp_baseline;
    FeatureParams fp = cfg_.features;
    fp.rng_seed = mix_seed(cfg_.features.rng_seed, index);
    const FeatureCloud fc = baseline ? baseline_cloud(cloud, fp, fp.rng_seed) : extract_features(cloud, fp);
    if (fc.points.empty()) throw Error(ErrorCode::empty_feature_cloud, "no training points after selection");

    KernelParams kp = cfg_.kernel;
    const InputEncoder encoder = fit_encoder(fc, baseline ? InputMode::planar : InputMode::whitened_features);
    if (baseline) {
      kp.lengthscales.setConstant(cfg_.baseline_lengthscale);
    }
    const TrainSet ts = make_train_set(fc, encoder);
    if (cfg_.hyper_iters > 0) kp = fit_hyperparameters(ts, kp, cfg_.hyper_iters, fp.rng_seed);
    const auto ids = select_inducing(fc, cfg_.m_ind);
    const SgpModel model = train_with_retry(ts, ids, kp);

    const auto geometry = window_geometry(frame.pose.x, frame.pose.y, cfg_.window_extent, cfg_.resolution);
    const TestGrid grid = build_test_grid(geometry, fc, cfg_.k_nearest, cfg_.idw_eps, encoder, visible(frame));
    const Prediction pred = predict(model, grid);

    FusionParams fusion = cfg_.fusion;
    if (baseline) {
      fusion.w_kappa = fusion.w_g = 0.0;
      fusion.w_grad = 1.0;
    }
    const double prior = model.params.prior_variance();
    TravGrid map = cfg_.method == Method::fsgp_bgk
                       ? update_map(history_, pred, grid, frame.t, fusion, prior,
                                    std::array<double, 2>{frame.pose.x, frame.pose.y})
                       : gaussian_smooth(preliminary_map(pred, grid, frame.t, fusion, prior), fusion);
    return resample_aligned(map, gt_.geometry);
  }

  TravGrid em_step(const ScanFrame& frame) {
    em_.insert(frame.cloud);
    const auto win = window_geometry(frame.pose.x, frame.pose.y, cfg_.window_extent, cfg_.resolution);
    const auto& g = gt_.geometry;
    std::vector<std::uint8_t> mask(g.size(), 0);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const auto wx = g.lattice_x() + ix - win.lattice_x();
        const auto wy = g.lattice_y() + iy - win.lattice_y();
        mask[g.index(ix, iy)] = wx >= 0 && wy >= 0 && wx < win.nx && wy < win.ny;
      }
    }
    return em_.render(cfg_.fusion, &mask);
  }

  const MethodConfig& cfg_;
  const GroundTruth& gt_;
  HistoryBuffer history_;
  ElevationMap em_;
  PointCloud accumulated_;
};

}  // namespace

MethodRun run_method(const MethodConfig& cfg, std::span<const ScanFrame> frames, const GroundTruth& gt) {
  cfg.validate();
  if (frames.empty()) throw Error(ErrorCode::invalid_argument, "run_method needs at least one frame");
  Runner runner(cfg, gt);
  MethodRun run;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& frame = frames[i];
    if (frame.cloud.empty()) {
      spdlog::warn("{}: frame {} has an empty cloud, skipped", to_string(cfg.method), i);
      continue;
    }
    const auto start = Clock::now();
    TravGrid map = runner.step(frame, i);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    ErrorStats stats;
    try {
      stats = compare(map, gt.oracle);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_overlap) throw;
      spdlog::warn("{}: frame {} has no cell overlapping the ground truth, skipped", to_string(cfg.method), i);
      continue;
    }
    spdlog::debug("{} frame {}: error {:.4f} var {:.4f} {:.1f} ms over {} cells", to_string(cfg.method), i,
                  stats.mean_error, stats.error_variance, ms, stats.cells);
    run.report.rows.push_back({i, stats.mean_error, stats.error_variance, ms});
    run.input_points.push_back(runner.input_size(frame));
    run.maps.push_back(std::move(map));
  }
  return run;
}

}  // namespace terra
