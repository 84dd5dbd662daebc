// terra: generate terrains, run mapping pipelines, benchmark, export heatmaps.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "terra/cloud/cloud_io.hpp"
#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"
#include "terra/config/config.hpp"
#include "terra/eval/bench.hpp"
#include "terra/travmap/grid_io.hpp"

namespace fs = std::filesystem;
using namespace terra;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kPartial = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("TERRA_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") spdlog::warn("TERRA_LOG='{}' not recognized (error, info, debug); using info", level);
  }
}

PipelineConfig base_config(const std::string& path) {
  return path.empty() ? parse_config_text("{}") : load_config(path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::io, fmt::format("{}: cannot write", path.string()));
}

std::string terrain_yaml(const TerrainSpec& t) {
  return fmt::format(
      "terrain:\n  kind: {}\n  extent: {:.17g}\n  point_density: {:.17g}\n  seed: {}\n"
      "  obstacle_density: {:.17g}\n  hill_amplitude: {:.17g}\n  hill_wavelength: {:.17g}\n"
      "  surface_noise: {:.17g}\n",
      to_string(t.kind), t.extent, t.point_density, t.seed, t.obstacle_density, t.hill_amplitude,
      t.hill_wavelength, t.surface_noise);
}

std::string trajectory_csv(const std::vector<Pose>& poses) {
  std::string text = "x,y,heading,t\n";
  for (const auto& p : poses) text += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g}\n", p.x, p.y, p.heading, p.t);
  return text;
}

std::vector<Pose> read_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("{}: cannot open", path.string()));
  std::vector<Pose> poses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (++lineno == 1 || line.empty()) continue;
    Pose p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p.x, &p.y, &p.heading, &p.t) != 4) {
      throw Error(ErrorCode::parse, fmt::format("{}:{}: expected x,y,heading,t", path.string(), lineno));
    }
    poses.push_back(p);
  }
  if (poses.empty()) throw Error(ErrorCode::parse, fmt::format("{}: no poses", path.string()));
  return poses;
}

int cmd_gen(const std::string& config_path, const std::string& kind, std::optional<std::uint64_t> seed,
            const std::string& out) {
  PipelineConfig cfg = base_config(config_path);
  if (!kind.empty()) {
    try {
      cfg.terrain.kind = parse_terrain_kind(kind);
    } catch (const Error& e) {
      throw UsageError(fmt::format("--kind: {}", e.what()));
    }
  }
  if (seed) cfg.terrain.seed = *seed;
  cfg.terrain.resolution = cfg.method.resolution;
  OracleParams oracle;
  oracle.fusion = cfg.method.fusion;
  oracle.k = cfg.method.features.k;
  oracle.eps = cfg.method.features.eps;
  const Terrain terrain = generate_terrain(cfg.terrain, oracle);
  const auto poses = make_trajectory(cfg.terrain, cfg.frames, cfg.frame_dt);

  fs::create_directories(out);
  save_cloud(terrain.cloud, fs::path(out) / "cloud.p3b");
  LayeredGrid gt = to_layers(terrain.truth.oracle);
  gt.add("height", std::vector<float>(terrain.truth.height.begin(), terrain.truth.height.end()));
  write_tgrid(gt, fs::path(out) / "gt.tgrid");
  write_text(fs::path(out) / "traj.csv", trajectory_csv(poses));
  write_text(fs::path(out) / "terrain.yaml", terrain_yaml(cfg.terrain));
  spdlog::info("{} terrain seed {}: {} points, {} obstacles -> {}", to_string(cfg.terrain.kind), cfg.terrain.seed,
               terrain.cloud.size(), terrain.truth.obstacles.size(), out);
  return kOk;
}

int cmd_run(const std::string& config_path, const std::string& terrain_dir, const std::string& method_name,
            std::optional<std::uint64_t> seed, const std::string& out) {
  PipelineConfig cfg = base_config(config_path);
  if (seed) cfg.seed = *seed;
  Method method;
  try {
    method = parse_method(method_name);
  } catch (const Error& e) {
    throw UsageError(fmt::format("--method: {}", e.what()));
  }
  const fs::path dir(terrain_dir);
  std::uint64_t terrain_seed = 0;
  if (fs::exists(dir / "terrain.yaml")) terrain_seed = load_config((dir / "terrain.yaml").string()).terrain.seed;

  GroundTruth gt;
  const LayeredGrid layers = read_tgrid(dir / "gt.tgrid");
  gt.oracle = from_layers(layers);
  gt.geometry = layers.geometry;
  if (const auto* h = layers.find("height")) gt.height.assign(h->begin(), h->end());
  if (std::abs(gt.geometry.resolution - cfg.method.resolution) > 1e-9) {
    throw Error(ErrorCode::config, fmt::format("sgp.resolution: {} does not match the ground truth resolution {}",
                                               cfg.method.resolution, gt.geometry.resolution));
  }
  const PointCloud cloud = load_cloud(dir / "cloud.p3b");
  const auto poses = read_trajectory(dir / "traj.csv");
  const auto frames = simulate_sequence(cloud, poses, cfg.method.sensor_radius, cfg.method.occlusion_frac,
                                        mix_seed(cfg.seed, terrain_seed));

  const auto mcfg = method_config(cfg, method, cfg.method.m_ind);
  const MethodRun run = run_method(mcfg, frames, gt);
  if (run.report.rows.empty()) throw Error(ErrorCode::no_overlap, "no frame produced a comparable map");

  fs::create_directories(out);
  for (std::size_t i = 0; i < run.maps.size(); ++i) {
    write_tgrid(to_layers(run.maps[i]), fs::path(out) / fmt::format("frame_{:03d}.tgrid", run.report.rows[i].frame));
  }
  const auto final_layers = to_layers(run.maps.back());
  const auto& score = *final_layers.find("score");
  const auto& observed = *final_layers.find("observed");
  std::vector<std::uint8_t> mask(observed.size());
  for (std::size_t c = 0; c < mask.size(); ++c) mask[c] = observed[c] > 0.5f;
  write_pgm16(score, mask, final_layers.geometry, {0.0, 1.0}, fs::path(out) / "final.pgm");
  write_report(run.report, (fs::path(out) / "report.csv").string());
  const auto avg = run.report.average();
  spdlog::info("{}: {} frames, mean error {:.4f}, variance {:.4f}, {:.1f} ms/frame", method_name,
               run.report.rows.size(), avg.mean_error, avg.error_variance, avg.runtime_ms);
  return kOk;
}

int cmd_bench(const std::string& manifest_path, const std::string& out, std::size_t jobs) {
  const BenchManifest manifest = load_manifest(manifest_path);
  spdlog::info("bench: {} scenarios x {} methods, {} jobs", manifest.scenarios.size(), manifest.methods.size(), jobs);
  const BenchResult result = run_bench(manifest, out, jobs);
  std::printf("%-8s %-18s %9s %12s %14s %12s\n", "kind", "method", "scenarios", "mean_error", "error_variance",
              "runtime_ms");
  for (const auto& r : result.aggregate) {
    std::printf("%-8s %-18s %9zu %12.6f %14.6f %12.2f\n", std::string(to_string(r.kind)).c_str(), r.label.c_str(),
                r.scenarios, r.mean_error, r.error_variance, r.runtime_ms);
  }
  for (const auto& inv : result.invariants) {
    std::printf("%s: %s (%.3f vs %.2f over %zu scenarios)\n", inv.pass ? "PASS" : "FAIL", inv.name.c_str(),
                inv.value, inv.threshold, inv.scenarios);
  }
  if (result.failures) {
    spdlog::error("{} of {} pairs failed", result.failures, result.pairs.size());
    return kPartial;
  }
  return kOk;
}

int cmd_export(const std::string& tgrid, const std::string& layer, const std::string& out,
               std::optional<double> lo, std::optional<double> hi) {
  const LayeredGrid grid = read_tgrid(tgrid);
  const auto* values = grid.find(layer);
  if (!values) throw Error(ErrorCode::missing_layer, fmt::format("{}: no layer '{}'", tgrid, layer));
  const auto* observed = grid.find("observed");
  std::vector<std::uint8_t> mask(values->size());
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    mask[c] = std::isfinite((*values)[c]) && (!observed || (*observed)[c] > 0.5f);
    if (!mask[c]) continue;
    vmin = std::min(vmin, double((*values)[c]));
    vmax = std::max(vmax, double((*values)[c]));
  }
  PgmExport range{std::isfinite(vmin) ? vmin : 0.0, std::isfinite(vmax) ? vmax : 1.0};
  if (lo) range.lo = *lo;
  if (hi) range.hi = *hi;
  if (!(range.hi > range.lo)) range.hi = range.lo + 1.0;
  write_pgm16(*values, mask, grid.geometry, range, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"terra: traversability mapping with feature-based sparse GPs"};
  app.require_subcommand(1);

  std::string config_path, out, kind, method = "fsgp-bgk", input, layer = "score";
  std::optional<std::uint64_t> seed;
  std::optional<double> lo, hi;
  std::size_t jobs = 1;

  auto* gen = app.add_subcommand("gen", "generate a terrain cloud, ground truth and trajectory");
  gen->add_option("--config", config_path, "pipeline config (YAML)");
  gen->add_option("--kind", kind, "terrain kind: hilly, forest, ruin");
  gen->add_option("--seed", seed, "terrain seed");
  gen->add_option("--out", out, "output directory")->required();

  auto* run = app.add_subcommand("run", "run one method over simulated scans of a generated terrain");
  run->add_option("terrain", input, "directory written by gen")->required();
  run->add_option("--config", config_path, "pipeline config (YAML)");
  run->add_option("--method", method, "sgp-baseline, fsgp, fsgp-bgk, em, fsgp-accum");
  run->add_option("--seed", seed, "scan simulation seed");
  run->add_option("--out", out, "output directory")->required();

  auto* bench = app.add_subcommand("bench", "run every scenario x method pair of a manifest");
  bench->add_option("manifest", input, "benchmark manifest (YAML)")->required();
  bench->add_option("--out", out, "output directory")->required();
  bench->add_option("--jobs", jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export", "export one layer of a .tgrid file as a 16-bit PGM heatmap");
  exp->add_option("tgrid", input, ".tgrid file")->required();
  exp->add_option("--layer", layer, "layer name");
  exp->add_option("--lo", lo, "value drawn white (default: layer minimum)");
  exp->add_option("--hi", hi, "value drawn black (default: layer maximum)");
  exp->add_option("--out", out, "output .pgm path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(config_path, kind, seed, out);
    if (*run) return cmd_run(config_path, input, method, seed, out);
    if (*bench) return cmd_bench(input, out, jobs);
    if (*exp) return cmd_export(input, layer, out, lo, hi);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return kRuntime;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  }
  return kUsage;
}
