#include "terra/config/config.hpp"

#include <filesystem>
#include <functional>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "terra/common/error.hpp"

namespace terra {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config, fmt::format("{}: {}", path, what));
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Map section reader that remembers which keys were consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    used_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const auto v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(join(path_, key), fmt::format("cannot parse '{}'", YAML::Dump(v)));
    }
  }

  void read(const std::string& key, Vector4& out) {
    used_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key]) return;
    const auto v = node_[key];
    try {
      if (v.IsScalar()) {
        out.setConstant(v.as<double>());
        return;
      }
      const auto list = v.as<std::vector<double>>();
      if (list.size() != 4) fail(join(path_, key), "expected 4 values");
      for (int d = 0; d < 4; ++d) out[d] = list[static_cast<std::size_t>(d)];
    } catch (const YAML::Exception&) {
      fail(join(path_, key), "expected a number or a list of 4 numbers");
    }
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section((node_ && node_.IsMap()) ? node_[key] : YAML::Node(), join(path_, key));
  }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return (node_ && node_.IsMap()) ? node_[key] : YAML::Node();
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) fail(join(path_, key), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

void read_terrain(Section s, TerrainSpec& t) {
  std::string kind(to_string(t.kind));
  s.read("kind", kind);
  try {
    t.kind = parse_terrain_kind(kind);
  } catch (const Error& e) {
    fail(join(s.path(), "kind"), e.what());
  }
  s.read("extent", t.extent);
  s.read("point_density", t.point_density);
  s.read("seed", t.seed);
  s.read("obstacle_density", t.obstacle_density);
  s.read("hill_amplitude", t.hill_amplitude);
  s.read("hill_wavelength", t.hill_wavelength);
  s.read("surface_noise", t.surface_noise);
  s.finish();
}

// Runs a validator and re-roots its key path under `prefix`.
void checked(const std::string& prefix, const std::function<void()>& validate) {
  try {
    validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) {
      throw Error(ErrorCode::config, prefix.empty() ? std::string(e.what()) : prefix + "." + e.what());
    }
    throw Error(ErrorCode::config, fmt::format("{}: {}", prefix, e.what()));
  }
}

void read_pipeline(Section& root, PipelineConfig& c) {
  auto& m = c.method;
  {
    auto s = root.child("features");
    s.read("k", m.features.k);
    s.read("eps", m.features.eps);
    s.read("tau_kappa", m.features.tau_kappa);
    s.read("tau_g", m.features.tau_g);
    s.read("voxel", m.features.voxel);
    s.read("max_points", m.features.max_points);
    s.read("rng_seed", m.features.rng_seed);
    s.finish();
  }
  {
    auto s = root.child("sgp");
    s.read("variance", m.kernel.variance);
    s.read("lengthscales", m.kernel.lengthscales);
    s.read("noise", m.kernel.noise);
    s.read("jitter", m.kernel.jitter);
    s.read("baseline_lengthscale", m.baseline_lengthscale);
    s.read("m_ind", m.m_ind);
    s.read("resolution", m.resolution);
    s.read("k_nearest", m.k_nearest);
    s.read("idw_eps", m.idw_eps);
    s.read("hyper_iters", m.hyper_iters);
    s.finish();
  }
  {
    auto s = root.child("fusion");
    auto& f = m.fusion;
    s.read("w_kappa", f.w_kappa);
    s.read("w_g", f.w_g);
    s.read("w_grad", f.w_grad);
    s.read("lambda", f.lambda);
    s.read("eps", f.eps);
    s.read("sigma_smooth", f.sigma_smooth);
    s.read("smooth_radius", f.smooth_radius);
    s.read("kappa_max", f.kappa_max);
    s.read("g_max", f.g_max);
    s.read("slope_max", f.slope_max);
    s.finish();
  }
  {
    auto s = root.child("sensor");
    s.read("radius", m.sensor_radius);
    s.read("occlusion_frac", m.occlusion_frac);
    s.finish();
  }
  {
    auto s = root.child("map");
    s.read("window_extent", m.window_extent);
    s.finish();
  }
  {
    auto s = root.child("run");
    s.read("frames", c.frames);
    s.read("dt", c.frame_dt);
    s.finish();
  }
  read_terrain(root.child("terrain"), c.terrain);
  root.read("seed", c.seed);
  c.terrain.resolution = m.resolution;
}

YAML::Node parse_yaml(const std::string& text, const std::string& where) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::config, fmt::format("{}: {}", where, e.what()));
  }
}

YAML::Node load_yaml(const std::string& path) {
  try {
    return YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw Error(ErrorCode::io, fmt::format("{}: cannot open", path));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::config, fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace

void PipelineConfig::validate() const {
  checked("", [&] { method.validate(); });
  checked("", [&] { terrain.validate(); });
  if (frames < 1) fail("run.frames", "must be >= 1");
  if (!(frame_dt > 0.0)) fail("run.dt", "must be > 0");
}

PipelineConfig parse_config(const YAML::Node& root, const std::string& where) {
  PipelineConfig c;
  try {
    Section s(root, "");
    read_pipeline(s, c);
    s.finish();
    c.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config && where != "<config>") {
      throw Error(ErrorCode::config, fmt::format("{}: {}", where, e.what()));
    }
    throw;
  }
  return c;
}

PipelineConfig load_config(const std::string& path) { return parse_config(load_yaml(path), path); }

PipelineConfig parse_config_text(const std::string& text) { return parse_config(parse_yaml(text, "<config>")); }

namespace {

BenchManifest parse_manifest(const YAML::Node& root, const std::string& base_dir) {
  BenchManifest m;
  Section s(root, "");
  if (auto inline_cfg = s.raw("pipeline"); inline_cfg) {
    m.pipeline = parse_config(inline_cfg);
  }
  std::string config_path;
  s.read("config", config_path);
  if (!config_path.empty()) {
    if (root["pipeline"]) fail("config", "give either 'config' or 'pipeline', not both");
    const auto p = std::filesystem::path(config_path);
    m.pipeline = load_config(p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string());
  }

  const auto scenarios = s.raw("scenarios");
  if (!scenarios || !scenarios.IsSequence() || scenarios.size() == 0) fail("scenarios", "expected a non-empty list");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    Section sc(scenarios[i], fmt::format("scenarios[{}]", i));
    TerrainSpec base = m.pipeline.terrain;
    std::string kind(to_string(base.kind));
    sc.read("kind", kind);
    try {
      base.kind = parse_terrain_kind(kind);
    } catch (const Error& e) {
      fail(sc.path() + ".kind", e.what());
    }
    read_terrain(sc.child("terrain"), base);
    std::vector<std::uint64_t> seeds;
    sc.read("seeds", seeds);
    std::uint64_t seed_start = 0, count = 0;
    sc.read("seed_start", seed_start);
    sc.read("count", count);
    for (std::uint64_t k = 0; k < count; ++k) seeds.push_back(seed_start + k);
    if (seeds.empty()) fail(sc.path(), "needs 'seeds' or 'count'");
    sc.finish();
    for (auto seed : seeds) {
      BenchScenario scenario{base};
      scenario.terrain.seed = seed;
      checked(sc.path() + ".terrain", [&] { scenario.terrain.validate(); });
      m.scenarios.push_back(scenario);
    }
  }

  const auto methods = s.raw("methods");
  if (!methods || !methods.IsSequence() || methods.size() == 0) fail("methods", "expected a non-empty list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto path = fmt::format("methods[{}]", i);
    BenchMethod bm{"", Method::fsgp_bgk, m.pipeline.method.m_ind};
    std::string name;
    if (methods[i].IsScalar()) {
      name = methods[i].as<std::string>();
    } else {
      Section ms(methods[i], path);
      ms.read("method", name);
      ms.read("label", bm.label);
      ms.read("m_ind", bm.m_ind);
      ms.finish();
    }
    try {
      bm.method = parse_method(name);
    } catch (const Error& e) {
      fail(path, e.what());
    }
    if (bm.m_ind < 1) fail(path + ".m_ind", "must be >= 1");
    if (bm.label.empty()) bm.label = name;
    if (!labels.insert(bm.label).second) fail(path, fmt::format("duplicate label '{}'", bm.label));
    m.methods.push_back(bm);
  }
  s.finish();
  return m;
}

}  // namespace

BenchManifest load_manifest(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  try {
    return parse_manifest(load_yaml(path), base.empty() ? "." : base);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw Error(ErrorCode::config, fmt::format("{}: {}", path, e.what()));
    throw;
  }
}

BenchManifest parse_manifest_text(const std::string& text, const std::string& base_dir) {
  return parse_manifest(parse_yaml(text, "<manifest>"), base_dir);
}

}  // namespace terra
