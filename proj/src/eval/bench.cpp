#include "terra/eval/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"

namespace terra {

Scenario make_scenario(const TerrainSpec& spec, const PipelineConfig& cfg) {
  Scenario s;
  OracleParams oracle;
  oracle.fusion = cfg.method.fusion;
  oracle.k = cfg.method.features.k;
  oracle.eps = cfg.method.features.eps;
  TerrainSpec t = spec;
  t.resolution = cfg.method.resolution;
  s.terrain = generate_terrain(t, oracle);
  s.poses = make_trajectory(t, cfg.frames, cfg.frame_dt);
  s.frames = simulate_sequence(s.terrain.cloud, s.poses, cfg.method.sensor_radius, cfg.method.occlusion_frac,
                               mix_seed(cfg.seed, t.seed));
  return s;
}

MethodConfig method_config(const PipelineConfig& cfg, Method method, std::size_t m_ind) {
  MethodConfig m = cfg.method;
  m.method = method;
  m.m_ind = m_ind;
  m.features.rng_seed = mix_seed(cfg.seed, cfg.method.features.rng_seed);
  return m;
}

namespace {

struct Key {
  int kind;
  std::uint64_t seed;
  bool operator<(const Key& o) const { return kind != o.kind ? kind < o.kind : seed < o.seed; }
};

// Per-scenario report lookup by label.
std::map<Key, std::map<std::string, const PairResult*>> by_scenario(const std::vector<PairResult>& pairs) {
  std::map<Key, std::map<std::string, const PairResult*>> out;
  for (const auto& p : pairs) {
    if (p.ok && !p.report.rows.empty()) out[{static_cast<int>(p.kind), p.seed}][p.label] = &p;
  }
  return out;
}

double avg_error(const PairResult* p) { return p->report.average().mean_error; }

void write_lines(const std::string& path, const std::string& text) {
  std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorCode::io, fmt::format("{}: cannot open for writing", path));
  std::fputs(text.c_str(), f.get());
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<PairResult>& pairs) {
  std::vector<AggregateRow> rows;
  for (const auto& p : pairs) {
    if (!p.ok || p.report.rows.empty()) continue;
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const AggregateRow& r) { return r.kind == p.kind && r.label == p.label; });
    if (it == rows.end()) {
      rows.push_back({p.kind, p.label});
      it = rows.end() - 1;
    }
    const auto avg = p.report.average();
    ++it->scenarios;
    it->mean_error += avg.mean_error;
    it->error_variance += avg.error_variance;
    it->runtime_ms += avg.runtime_ms;
  }
  for (auto& r : rows) {
    const double n = static_cast<double>(r.scenarios);
    r.mean_error /= n;
    r.error_variance /= n;
    r.runtime_ms /= n;
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const AggregateRow& a, const AggregateRow& b) { return a.kind < b.kind; });
  return rows;
}

std::vector<InvariantRate> invariant_rates(const std::vector<PairResult>& pairs) {
  const auto scen = by_scenario(pairs);
  std::vector<InvariantRate> out;
  auto rate = [&](const std::string& name, double threshold, std::initializer_list<const char*> labels,
                  auto&& check) {
    InvariantRate r{name, 0, 0.0, threshold, false};
    std::size_t hits = 0;
    for (const auto& [key, reports] : scen) {
      bool all = true;
      for (const char* l : labels) all = all && reports.count(l);
      if (!all) continue;
      ++r.scenarios;
      hits += check(reports) ? 1 : 0;
    }
    if (r.scenarios == 0) return;
    r.value = static_cast<double>(hits) / static_cast<double>(r.scenarios);
    r.pass = r.value >= threshold;
    out.push_back(r);
  };

  rate("ordering bgk<fsgp<=1.05sgp", 0.8, {"sgp-baseline", "fsgp", "fsgp-bgk"}, [](const auto& m) {
    const double sgp = avg_error(m.at("sgp-baseline")), f = avg_error(m.at("fsgp")),
                 b = avg_error(m.at("fsgp-bgk"));
    return b < f && f <= 1.05 * sgp;
  });
  {
    // Relative improvement of the averaged errors.
    double sgp = 0.0, bgk = 0.0;
    std::size_t n = 0;
    for (const auto& [key, m] : scen) {
      if (!m.count("sgp-baseline") || !m.count("fsgp-bgk")) continue;
      sgp += avg_error(m.at("sgp-baseline"));
      bgk += avg_error(m.at("fsgp-bgk"));
      ++n;
    }
    if (n > 0 && sgp > 0.0) {
      const double gain = 1.0 - bgk / sgp;
      out.push_back({"improvement bgk vs sgp", n, gain, 0.10, gain >= 0.10});
    }
  }
  rate("bgk beats em", 0.75, {"em", "fsgp-bgk"},
       [](const auto& m) { return avg_error(m.at("fsgp-bgk")) < avg_error(m.at("em")); });
  rate("bgk final<=first", 0.8, {"fsgp-bgk"}, [](const auto& m) {
    const auto& rows = m.at("fsgp-bgk")->report.rows;
    return rows.back().mean_error <= rows.front().mean_error;
  });
  rate("runtime bgk<0.8accum at frame 10", 1.0, {"fsgp-bgk", "fsgp-accum"}, [](const auto& m) {
    const auto& b = m.at("fsgp-bgk")->report.rows;
    const auto& a = m.at("fsgp-accum")->report.rows;
    if (b.size() < 10 || a.size() < 10) return false;
    return b[9].runtime_ms < 0.8 * a[9].runtime_ms;
  });
  rate("sweep gain@50>=gain@500", 0.6, {"sgp-baseline@50", "fsgp-bgk@50", "sgp-baseline@500", "fsgp-bgk@500"},
       [](const auto& m) {
         const double g50 = 1.0 - avg_error(m.at("fsgp-bgk@50")) / avg_error(m.at("sgp-baseline@50"));
         const double g500 = 1.0 - avg_error(m.at("fsgp-bgk@500")) / avg_error(m.at("sgp-baseline@500"));
         return g50 >= g500;
       });
  return out;
}

void write_aggregate(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::string text = "kind,method,scenarios,mean_error,error_variance,runtime_ms\n";
  for (const auto& r : rows) {
    text += fmt::format("{},{},{},{}\n", to_string(r.kind), r.label, r.scenarios,
                        fmt::format("{:.9g},{:.9g},{:.9g}", r.mean_error, r.error_variance, r.runtime_ms));
  }
  write_lines(path, text);
}

void write_invariants(const std::vector<InvariantRate>& rows, const std::string& path) {
  std::string text = "check,scenarios,value,threshold,pass\n";
  for (const auto& r : rows) {
    text += fmt::format("{},{},{:.9g},{:.9g},{}\n", r.name, r.scenarios, r.value, r.threshold,
                        r.pass ? "pass" : "fail");
  }
  write_lines(path, text);
}

BenchResult run_bench(const BenchManifest& manifest, const std::string& out_dir, std::size_t jobs) {
  const auto& scenarios = manifest.scenarios;
  const auto& methods = manifest.methods;
  BenchResult result;
  result.pairs.resize(scenarios.size() * methods.size());
  if (!out_dir.empty()) std::filesystem::create_directories(std::filesystem::path(out_dir) / "reports");

  jobs = std::max<std::size_t>(1, std::min(jobs, scenarios.size()));
  const std::size_t saved_workers = worker_count();
  if (jobs > 1) set_worker_count(1);

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t s = next++; s < scenarios.size(); s = next++) {
      const auto& spec = scenarios[s].terrain;
      std::optional<Scenario> scenario;
      std::string scenario_error;
      try {
        scenario.emplace(make_scenario(spec, manifest.pipeline));
      } catch (const std::exception& e) {
        scenario_error = e.what();
      }
      for (std::size_t m = 0; m < methods.size(); ++m) {
        auto& pair = result.pairs[s * methods.size() + m];
        pair.kind = spec.kind;
        pair.seed = spec.seed;
        pair.label = methods[m].label;
        if (!scenario) {
          pair.error = "scenario generation failed: " + scenario_error;
          continue;
        }
        try {
          const auto cfg = method_config(manifest.pipeline, methods[m].method, methods[m].m_ind);
          auto run = run_method(cfg, scenario->frames, scenario->terrain.truth);
          if (run.report.rows.empty()) throw Error(ErrorCode::no_overlap, "no frame produced a comparable map");
          pair.report = std::move(run.report);
          pair.input_points = std::move(run.input_points);
          pair.ok = true;
          if (!out_dir.empty()) {
            write_report(pair.report,
                         (std::filesystem::path(out_dir) / "reports" /
                          fmt::format("{}-{}-{}.csv", to_string(spec.kind), spec.seed, pair.label))
                             .string());
          }
        } catch (const std::exception& e) {
          pair.ok = false;
          pair.error = e.what();
        }
        std::lock_guard lock(log_mutex);
        if (pair.ok) {
          spdlog::info("{} seed {} {}: mean error {:.4f}", to_string(spec.kind), spec.seed, pair.label,
                       pair.report.average().mean_error);
        } else {
          spdlog::error("{} seed {} {}: {}", to_string(spec.kind), spec.seed, pair.label, pair.error);
        }
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (jobs > 1) set_worker_count(saved_workers);

  for (const auto& p : result.pairs) result.failures += p.ok ? 0 : 1;
  result.aggregate = aggregate(result.pairs);
  result.invariants = invariant_rates(result.pairs);
  if (!out_dir.empty()) {
    write_aggregate(result.aggregate, (std::filesystem::path(out_dir) / "aggregate.csv").string());
    write_invariants(result.invariants, (std::filesystem::path(out_dir) / "invariants.csv").string());
    if (result.failures) {
      std::string text;
      for (const auto& p : result.pairs) {
        if (!p.ok) text += fmt::format("{},{},{},{}\n", to_string(p.kind), p.seed, p.label, p.error);
      }
      write_lines((std::filesystem::path(out_dir) / "failures.csv").string(), text);
    }
  }
  return result;
}

}  // namespace terra
