#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "terra/eval/methods.hpp"
#include "terra/synth/terrain.hpp"

namespace YAML {
class Node;
}

namespace terra {

struct PipelineConfig {
  MethodConfig method;       // method field is chosen per run
  TerrainSpec terrain;
  std::size_t frames = 20;   // trajectory poses
  double frame_dt = 0.5;     // seconds
  std::uint64_t seed = 0;

  void validate() const;
};

/// Every key is optional; unknown keys and invalid values raise
/// Error(config) naming the offending key path.
PipelineConfig parse_config(const YAML::Node& root, const std::string& where = "<config>");
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& text);

struct BenchMethod {
  std::string label;  // aggregate key
  Method method;
  std::size_t m_ind;
};

struct BenchScenario {
  TerrainSpec terrain;
};

struct BenchManifest {
  PipelineConfig pipeline;
  std::vector<BenchScenario> scenarios;
  std::vector<BenchMethod> methods;
};

BenchManifest load_manifest(const std::string& path);
BenchManifest parse_manifest_text(const std::string& text, const std::string& base_dir = ".");

}  // namespace terra
