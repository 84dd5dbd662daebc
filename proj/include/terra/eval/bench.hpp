#pragma once

#include <string>
#include <vector>

#include "terra/config/config.hpp"
#include "terra/eval/methods.hpp"
#include "terra/eval/scan.hpp"
#include "terra/synth/terrain.hpp"

namespace terra {

struct Scenario {
  Terrain terrain;
  std::vector<Pose> poses;
  std::vector<ScanFrame> frames;
};

/// Terrain, lawnmower trajectory and occluded scans for one terrain spec.
Scenario make_scenario(const TerrainSpec& spec, const PipelineConfig& cfg);

MethodConfig method_config(const PipelineConfig& cfg, Method method, std::size_t m_ind);

struct PairResult {
  TerrainKind kind;
  std::uint64_t seed = 0;
  std::string label;
  bool ok = false;
  std::string error;
  EvalReport report;
  std::vector<std::size_t> input_points;
};

struct AggregateRow {
  TerrainKind kind;
  std::string label;
  std::size_t scenarios = 0;
  double mean_error = 0.0;
  double error_variance = 0.0;
  double runtime_ms = 0.0;
};

struct InvariantRate {
  std::string name;
  std::size_t scenarios = 0;
  double value = 0.0;  // rate or average, depending on the check
  double threshold = 0.0;
  bool pass = false;
};

struct BenchResult {
  std::vector<PairResult> pairs;  // scenario-major, manifest method order
  std::vector<AggregateRow> aggregate;
  std::vector<InvariantRate> invariants;
  std::size_t failures = 0;
};

/// Runs every (scenario, method) pair, `jobs` scenarios at a time. Failed
/// pairs are recorded, not thrown. Writes reports/<kind>-<seed>-<label>.csv,
/// aggregate.csv and invariants.csv under out_dir when it is non-empty.
BenchResult run_bench(const BenchManifest& manifest, const std::string& out_dir, std::size_t jobs = 1);

/// Means of the per-pair report averages, keyed (kind, label).
std::vector<AggregateRow> aggregate(const std::vector<PairResult>& pairs);

/// Ordering, elevation-map, temporal, accumulation-cost and inducing-sweep
/// checks for whichever labels are present.
std::vector<InvariantRate> invariant_rates(const std::vector<PairResult>& pairs);

void write_aggregate(const std::vector<AggregateRow>& rows, const std::string& path);
void write_invariants(const std::vector<InvariantRate>& rows, const std::string& path);

}  // namespace terra
