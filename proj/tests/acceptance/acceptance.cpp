// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "../support/oracles.hpp"
#include "terra/config/config.hpp"
#include "terra/eval/bench.hpp"
#include "terra/features/features.hpp"
#include "terra/features/pca.hpp"
#include "terra/sgp/sgp.hpp"
#include "terra/travmap/fusion.hpp"

using namespace terra;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const InvariantRate* find_rate(const BenchResult& r, const std::string& prefix) {
  for (const auto& inv : r.invariants)
    if (inv.name.rfind(prefix, 0) == 0) return &inv;
  return nullptr;
}

std::string rate_text(const InvariantRate* r) {
  if (!r) return "not computed";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.3f (threshold %.2f, %zu scenarios)", r->value, r->threshold, r->scenarios);
  return buf;
}

void dense_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  std::normal_distribution<double> g(0.0, 0.02);
  FeatureCloud fc;
  for (int i = 0; i < 200; ++i) {
    FeaturePoint p;
    p.x = u(rng);
    p.y = u(rng);
    p.z = 0.6 * std::sin(0.8 * p.x) * std::cos(0.5 * p.y) + g(rng);
    p.kappa = 0.02 * u(rng);
    p.grad = 0.01 * u(rng);
    fc.points.push_back(p);
  }
  const auto enc = fit_encoder(fc, InputMode::whitened_features);
  const auto ts = make_train_set(fc, enc);
  KernelParams kp;
  kp.variance = 0.4;
  kp.lengthscales = Vector4(0.5, 0.5, 1.5, 1.5);
  kp.noise = 0.01;
  std::vector<std::size_t> ids(fc.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  const auto model = train(ts, ids, kp);
  const auto grid = build_test_grid(square_grid(0.0, 0.0, 8.0, 0.2), fc, 8, 1e-6, enc);
  const auto pred = predict(model, grid);

  std::vector<oracle::V4> z, test;
  for (const auto& x : ts.inputs) z.push_back({x[0], x[1], x[2], x[3]});
  for (const auto& x : grid.inputs) test.push_back({x[0], x[1], x[2], x[3]});
  const auto want = oracle::dense_sor(z, ts.targets, ts.target_mean, test, kp.variance,
                                      {kp.lengthscales[0], kp.lengthscales[1], kp.lengthscales[2], kp.lengthscales[3]},
                                      kp.noise, kp.jitter);
  double dm = 0.0, dv = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    dm = std::max(dm, std::abs(pred.mean[c] - want.mean[c]));
    dv = std::max(dv, std::abs(pred.variance[c] - want.variance[c]));
  }
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "200 points, max |mean diff| %.2e, max |variance diff| %.2e (tol 1e-6), %.2f s (< 5 s)",
                dm, dv, secs);
  report(1, "dense GP oracle equivalence", dm <= 1e-6 && dv <= 1e-6 && secs < 5.0, buf);
}

void property_suites() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::string> broken;
  constexpr int kTrials = 10000;

  // Curvature range and eigenvalue oracle.
  double eig_err = 0.0;
  bool in_range = true;
  for (int t = 0; t < kTrials; ++t) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
    const Eigen::Matrix3d m = a * a.transpose();
    const double k = curvature(m, 1e-8);
    in_range = in_range && k >= 0.0 && k <= 1.0 / 3.0;
    oracle::Mat om(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) om[i][j] = m(i, j);
    const auto ev = oracle::jacobi_eigenvalues(om);
    const auto got = symmetric_eigenvalues(m);
    for (int i = 0; i < 3; ++i) eig_err = std::max(eig_err, std::abs(got[i] - ev[i]) / std::max(1.0, ev[2]));
  }
  if (!in_range) broken.push_back("curvature range");
  if (eig_err > 1e-9) broken.push_back("eigen oracle");

  double idw_err = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    std::vector<double> d(1 + t % 16);
    for (double& x : d) x = 10.0 * u(rng);
    double s = 0.0;
    for (double w : idw_weights(d, 1e-6)) s += w;
    idw_err = std::max(idw_err, std::abs(s - 1.0));
  }
  if (idw_err > 1e-12) broken.push_back("idw sum");

  bool convex = true, decay = true, confidence = true;
  for (int t = 0; t < kTrials; ++t) {
    FusionParams p;
    p.lambda = 2.0 * u(rng);
    const TravCell prior{u(rng), u(rng), 5.0 * u(rng), true};
    const double pre = u(rng), pre_var = u(rng), dt = 3.0 * u(rng);
    const auto c = bgk_fuse(prior, pre, pre_var, prior.timestamp + dt, p);
    convex = convex && c.score >= std::min(prior.score, pre) - 1e-15 && c.score <= std::max(prior.score, pre) + 1e-15 &&
             c.variance >= std::min(prior.variance, pre_var) - 1e-15 &&
             c.variance <= std::max(prior.variance, pre_var) + 1e-15;
    const auto later = bgk_fuse(prior, pre, pre_var, prior.timestamp + dt + 0.1 + u(rng), p);
    decay = decay && std::abs(later.score - pre) <= std::abs(c.score - pre) + 1e-15;
    TravCell sharper = prior;
    sharper.variance *= u(rng);
    const auto sure = bgk_fuse(sharper, pre, pre_var, prior.timestamp + dt, p);
    confidence = confidence && std::abs(sure.score - prior.score) <= std::abs(c.score - prior.score) + 1e-15;
  }
  if (!convex) broken.push_back("bgk convexity");
  if (!decay) broken.push_back("bgk decay");
  if (!confidence) broken.push_back("bgk confidence");

  bool smooth_ok = true;
  const auto geom = square_grid(0.0, 0.0, 3.0, 0.2);
  FusionParams fp;
  TravGrid uniform(geom);
  for (auto& c : uniform.cells) c = {0.43, 0.1, 0.0, true};
  for (const auto& c : gaussian_smooth(uniform, fp).cells) smooth_ok = smooth_ok && std::abs(c.score - 0.43) < 1e-15;
  for (int t = 0; t < 200; ++t) {
    TravGrid grid(geom);
    double lo = 1.0, hi = 0.0;
    for (auto& c : grid.cells) {
      if (u(rng) < 0.3) continue;
      c = {u(rng), 0.1, 0.0, true};
      lo = std::min(lo, c.score);
      hi = std::max(hi, c.score);
    }
    const auto s = gaussian_smooth(grid, fp);
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
      if (s.cells[i].observed != grid.cells[i].observed) smooth_ok = false;
      if (s.cells[i].observed && (s.cells[i].score < lo - 1e-15 || s.cells[i].score > hi + 1e-15)) smooth_ok = false;
    }
  }
  if (!smooth_ok) broken.push_back("smoothing");

  double ortho = 0.0, trip = 0.0;
  for (int t = 0; t < 500; ++t) {
    Eigen::Matrix4d mix;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) mix(i, j) = g(rng);
    std::vector<Vector4> rows;
    for (int i = 0; i < 100; ++i) rows.push_back(mix * Vector4(4.0 * g(rng), g(rng), 0.1 * g(rng), 0.02 * g(rng)));
    const auto pca = fit_pca(rows);
    ortho = std::max(ortho, (pca.basis.transpose() * pca.basis - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
    for (const auto& r : rows) trip = std::max(trip, (invert_pca(pca, apply_pca(pca, r)) - r).cwiseAbs().maxCoeff());
  }
  if (ortho > 1e-9) broken.push_back("pca orthonormality");
  if (trip > 1e-9) broken.push_back("pca round trip");

  char buf[300];
  std::snprintf(buf, sizeof buf,
                "eigen err %.1e, idw err %.1e, bgk/smoothing over 1e4 inputs, pca ortho %.1e, round trip %.1e%s", eig_err,
                idw_err, ortho, trip, broken.empty() ? "" : " | broken:");
  std::string detail = buf;
  for (const auto& b : broken) detail += " " + b;
  report(2, "formula-level property suites", broken.empty(), detail);
}

// Every numeric field of every CSV under a bench output directory, keyed by
// file and position; runtime columns are left out.
std::vector<std::string> csv_numbers(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line, header;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
      std::stringstream hs(header);
      std::string c;
      while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
      std::stringstream ls(line);
      std::string cell;
      for (std::size_t col = 0; std::getline(ls, cell, ','); ++col) {
        if (col < cols.size() && cols[col] == "runtime_ms") continue;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        char buf[64];
        if (end != cell.c_str() && *end == '\0') std::snprintf(buf, sizeof buf, "%.9g", v);
        out.push_back(fs::relative(f, dir).string() + ":" + std::to_string(row) + ":" + std::to_string(col) + "=" +
                      (end != cell.c_str() && *end == '\0' ? std::string(buf) : cell));
      }
      ++row;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const fs::path manifests = argc > 1 ? fs::path(argv[1]) : fs::path(TERRA_MANIFEST_DIR);
  const fs::path work = fs::temp_directory_path() / "terra_acceptance";
  fs::remove_all(work);

  dense_oracle();
  property_suites();

  const auto t_main = std::chrono::steady_clock::now();
  const auto main_manifest = load_manifest((manifests / "hilly20.yaml").string());
  const auto main = run_bench(main_manifest, (work / "main").string(), 1);
  const double main_secs = seconds_since(t_main);
  {
    const auto* order = find_rate(main, "ordering");
    const auto* gain = find_rate(main, "improvement");
    char buf[400];
    std::snprintf(buf, sizeof buf, "ordering %s; improvement %s; %.0f s (< 600 s)", rate_text(order).c_str(),
                  rate_text(gain).c_str(), main_secs);
    report(3, "method ordering on 20 hilly scenarios", order && order->pass && gain && gain->pass && main_secs < 600.0,
           buf);
  }
  {
    const auto* em = find_rate(main, "bgk beats em");
    std::string detail = rate_text(em);
    for (const auto& row : main.aggregate) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "; %s %.2f ms/frame", row.label.c_str(), row.runtime_ms);
      detail += buf;
    }
    report(4, "fused map beats elevation map", em && em->pass, detail);
  }

  const auto accum = run_bench(load_manifest((manifests / "hilly-accum.yaml").string()), (work / "accum").string(), 1);
  {
    const auto* rt = find_rate(accum, "runtime");
    report(5, "fused update cheaper than accumulation at frame 10", rt && rt->pass && accum.failures == 0,
           rate_text(rt));
  }
  {
    const auto* tr = find_rate(main, "bgk final");
    report(6, "final-frame error <= first-frame error", tr && tr->pass, rate_text(tr));
  }

  const auto sweep = run_bench(load_manifest((manifests / "hilly20-sweep.yaml").string()), (work / "sweep").string(), 1);
  {
    const auto* sw = find_rate(sweep, "sweep");
    std::string detail = rate_text(sw) + "; failed pairs " + std::to_string(sweep.failures);
    for (const auto& row : sweep.aggregate) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "; %s %.4f", row.label.c_str(), row.mean_error);
      detail += buf;
    }
    report(7, "advantage at 50 inducing points >= at 500", sw && sw->pass && sweep.failures == 0, detail);
  }

  run_bench(main_manifest, (work / "rerun").string(), 1);
  {
    const auto a = csv_numbers(work / "main"), b = csv_numbers(work / "rerun");
    std::size_t diffs = a.size() == b.size() ? 0 : std::max(a.size(), b.size());
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diffs += a[i] != b[i];
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu fields compared at 9 significant digits, %zu differ (runtime columns excluded)",
                  a.size(), diffs);
    report(8, "bench rerun reproduces CSV numbers", diffs == 0 && !a.empty(), buf);
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
