#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "../support/oracles.hpp"
#include "terra/cloud/filters.hpp"
#include "terra/common/error.hpp"
#include "terra/eval/elevation_map.hpp"
#include "terra/eval/methods.hpp"
#include "terra/eval/metrics.hpp"
#include "terra/eval/scan.hpp"

using namespace terra;

namespace {

PointCloud disk(std::size_t n, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  PointCloud c;
  while (c.size() < n) {
    const double x = u(rng), y = u(rng);
    if (x * x + y * y <= radius * radius) c.points.emplace_back(x, y, 0.0);
  }
  return c;
}

TravGrid random_grid(const GridGeometry& g, std::uint64_t seed, double p_obs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  TravGrid t(g);
  for (auto& c : t.cells)
    if (u(rng) < p_obs) c = {u(rng), 0.0, 0.0, true};
  return t;
}

Terrain small_terrain() {
  TerrainSpec spec;
  spec.extent = 10.0;
  spec.seed = 7;
  spec.hill_wavelength = 10.0;
  return generate_terrain(spec);
}

MethodConfig small_config(Method m) {
  MethodConfig cfg;
  cfg.method = m;
  cfg.sensor_radius = 5.0;
  cfg.window_extent = 10.0;
  cfg.m_ind = 60;
  cfg.features.max_points = 600;
  return cfg;
}

}  // namespace

TEST(Occlusion, ZeroAndFull) {
  const auto cloud = disk(2000, 10.0, 1);
  const Pose pose{0.5, -0.5, 0.0, 0.0};
  const auto none = simulate_scan(cloud, pose, 6.0, 0.0, 3);
  EXPECT_EQ(none.cloud.points, crop_radius(cloud, Point3(0.5, -0.5, 0.0), 6.0).points);
  EXPECT_TRUE(simulate_scan(cloud, pose, 6.0, 1.0, 3).cloud.empty());
}

TEST(Occlusion, RemovedFractionMatchesRequest) {
  const auto cloud = disk(200000, 8.0, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sectors = occlusion_sectors(0.15, seed);
    EXPECT_GE(sectors.size(), 1u);
    EXPECT_LE(sectors.size(), 4u);
    double total = 0.0;
    for (const auto& s : sectors) total += s.width;
    EXPECT_NEAR(total, 0.15 * 2.0 * M_PI, 1e-9);
    const auto scan = simulate_scan(cloud, Pose{}, 8.0, 0.15, seed);
    const double removed = 1.0 - static_cast<double>(scan.cloud.size()) / cloud.size();
    EXPECT_NEAR(removed, 0.15, 0.02);
  }
}

TEST(Compare, IdentityOffsetAndLoopOracle) {
  const auto g = square_grid(0, 0, 3.0, 0.2);
  const auto a = random_grid(g, 1, 1.0);
  auto stats = compare(a, a);
  EXPECT_EQ(stats.mean_error, 0.0);
  EXPECT_EQ(stats.error_variance, 0.0);

  TravGrid lo(g), hi(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    lo.cells[c] = {0.2 + 0.5 * (c % 7) / 7.0, 0, 0, true};
    hi.cells[c] = {lo.cells[c].score + 0.1, 0, 0, true};
  }
  stats = compare(hi, lo);
  EXPECT_NEAR(stats.mean_error, 0.1, 1e-12);
  EXPECT_NEAR(stats.error_variance, 0.0, 1e-12);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_grid(g, 100 + seed, 0.7), t = random_grid(g, 200 + seed, 0.9);
    std::vector<double> x, y;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (!m.cells[c].observed || !t.cells[c].observed) continue;
      x.push_back(m.cells[c].score);
      y.push_back(t.cells[c].score);
    }
    const auto want = oracle::abs_error_stats(x, y);
    const auto got = compare(m, t);
    EXPECT_EQ(got.cells, x.size());
    EXPECT_NEAR(got.mean_error, want.mean, 1e-12);
    EXPECT_NEAR(got.error_variance, want.var, 1e-12);
  }
}

TEST(Compare, Errors) {
  const auto g = square_grid(0, 0, 1.0, 0.2);
  auto other = g;
  other.origin_x = 0.2;
  try {
    compare(TravGrid(g), TravGrid(other));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::geometry_mismatch);
  }
  try {
    compare(TravGrid(g), random_grid(g, 1, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_overlap);
  }
}

TEST(Report, RoundTripAndAggregate) {
  EvalReport r;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < 7; ++i) r.rows.push_back({i, u(rng), 0.01 * u(rng), 100.0 * u(rng)});
  const auto path = (std::filesystem::temp_directory_path() / "terra_unit_report.csv").string();
  write_report(r, path);
  const auto back = read_report(path);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].frame, r.rows[i].frame);
    EXPECT_NEAR(back.rows[i].mean_error, r.rows[i].mean_error, 1e-8 * r.rows[i].mean_error);
    EXPECT_NEAR(back.rows[i].runtime_ms, r.rows[i].runtime_ms, 1e-8 * r.rows[i].runtime_ms);
  }
  const auto avg = r.average();
  double s = 0.0;
  for (const auto& row : r.rows) s += row.mean_error;
  EXPECT_NEAR(avg.mean_error, s / 7.0, 1e-15);

  EvalReport one;
  one.rows.push_back({0, 0.25, 0.0, 1.5});
  write_report(one, path);
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "frame,mean_error,error_variance,runtime_ms");
  EXPECT_EQ(lines[2].rfind("# avg,", 0), 0u);
  EXPECT_THROW(write_report(EvalReport{}, path), Error);
  std::filesystem::remove(path);
}

TEST(ElevationMap, FlatPlaneAndGaps) {
  const auto g = square_grid(0, 0, 2.0, 0.2);
  PointCloud c;
  for (double y = 0.05; y < 2.0; y += 0.1)
    for (double x = 0.05; x < 1.0; x += 0.1) c.points.emplace_back(x, y, 0.4);
  const auto map = elevation_map_baseline(std::vector<PointCloud>{c}, g, FusionParams{});
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const auto& cell = map.at(ix, iy);
      EXPECT_EQ(cell.observed, g.center_x(ix) < 1.0);
      if (cell.observed) EXPECT_NEAR(cell.score, 0.0, 1e-12);
    }
  EXPECT_THROW(elevation_map_baseline(std::vector<PointCloud>{PointCloud{}}, g, FusionParams{}), Error);
}

TEST(ElevationMap, StepEdge) {
  const auto g = square_grid(0, 0, 2.0, 0.2);
  PointCloud c;
  for (double y = 0.05; y < 2.0; y += 0.1)
    for (double x = 0.05; x < 2.0; x += 0.1) c.points.emplace_back(x, y, x < 1.0 ? 0.0 : 1.0);
  const auto map = elevation_map_baseline(std::vector<PointCloud>{c}, g, FusionParams{});
  for (int iy = 0; iy < g.ny; ++iy) {
    EXPECT_GT(map.at(4, iy).score, 0.3);
    EXPECT_GT(map.at(5, iy).score, 0.3);
    EXPECT_NEAR(map.at(1, iy).score, 0.0, 1e-12);
    EXPECT_NEAR(map.at(8, iy).score, 0.0, 1e-12);
  }
}

TEST(ElevationMap, RunningStatistics) {
  ElevationMap em(square_grid(0, 0, 1.0, 1.0));
  PointCloud a, b;
  a.points = {{0.5, 0.5, 1.0}, {0.5, 0.5, 3.0}};
  b.points = {{0.5, 0.5, 5.0}};
  em.insert(a);
  em.insert(b);
  EXPECT_EQ(em.count(0), 3u);
  EXPECT_NEAR(em.height(0), 3.0, 1e-15);
  EXPECT_NEAR(em.roughness(0), std::sqrt(8.0 / 3.0), 1e-14);
}

TEST(Methods, FirstFrameFsgpEqualsBgk) {
  const auto terrain = small_terrain();
  const std::vector<ScanFrame> frames{simulate_scan(terrain.cloud, Pose{5.0, 5.0, 0.0, 0.0}, 5.0, 0.15, 1)};
  const auto a = run_method(small_config(Method::fsgp), frames, terrain.truth);
  const auto b = run_method(small_config(Method::fsgp_bgk), frames, terrain.truth);
  ASSERT_EQ(a.maps.size(), 1u);
  ASSERT_EQ(b.maps.size(), 1u);
  std::size_t both = 0;
  for (std::size_t c = 0; c < a.maps[0].cells.size(); ++c) {
    ASSERT_EQ(a.maps[0].cells[c].observed, b.maps[0].cells[c].observed);
    if (!a.maps[0].cells[c].observed) continue;
    ++both;
    EXPECT_NEAR(a.maps[0].cells[c].score, b.maps[0].cells[c].score, 1e-9);
  }
  EXPECT_GT(both, 100u);
}

TEST(Methods, StaticReplayErrorNonIncreasing) {
  const auto terrain = small_terrain();
  const auto scan = simulate_scan(terrain.cloud, Pose{5.0, 5.0, 0.0, 0.0}, 5.0, 0.15, 2);
  std::vector<ScanFrame> frames;
  for (int i = 0; i < 5; ++i) {
    frames.push_back(scan);
    frames.back().t = frames.back().pose.t = 0.5 * i;
  }
  const auto run = run_method(small_config(Method::fsgp_bgk), frames, terrain.truth);
  ASSERT_EQ(run.report.rows.size(), 5u);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_LE(run.report.rows[i].mean_error, run.report.rows[i - 1].mean_error + 1e-12);
}

TEST(Methods, AccumulationInputIsRunningSum) {
  const auto terrain = small_terrain();
  const auto poses = make_trajectory(terrain.truth.spec, 4);
  const auto frames = simulate_sequence(terrain.cloud, poses, 5.0, 0.15, 9);
  const auto run = run_method(small_config(Method::fsgp_accum), frames, terrain.truth);
  std::size_t sum = 0;
  ASSERT_EQ(run.input_points.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    sum += frames[i].cloud.size();
    EXPECT_EQ(run.input_points[i], sum);
  }
}

TEST(Methods, EmptyFramesSkippedAndErrorsBounded) {
  const auto terrain = small_terrain();
  const auto poses = make_trajectory(terrain.truth.spec, 3);
  auto frames = simulate_sequence(terrain.cloud, poses, 5.0, 0.15, 4);
  frames[1].cloud.points.clear();
  for (auto m : {Method::sgp_baseline, Method::fsgp, Method::fsgp_bgk, Method::em}) {
    const auto run = run_method(small_config(m), frames, terrain.truth);
    ASSERT_EQ(run.report.rows.size(), 2u) << to_string(m);
    EXPECT_EQ(run.report.rows[1].frame, 2u);
    for (const auto& row : run.report.rows) {
      EXPECT_GE(row.mean_error, 0.0);
      EXPECT_LE(row.mean_error, 1.0);
      EXPECT_GE(row.error_variance, 0.0);
      EXPECT_LE(row.error_variance, 1.0);
    }
  }
  EXPECT_THROW(parse_method("fast"), Error);
}

TEST(Methods, WindowGeometryFollowsLattice) {
  const auto g = window_geometry(3.07, -1.93, 4.0, 0.2);
  EXPECT_EQ(g.nx, 20);
  EXPECT_NEAR(g.origin_x, 1.0, 1e-12);
  EXPECT_NEAR(g.origin_y, -4.0, 1e-12);
}
