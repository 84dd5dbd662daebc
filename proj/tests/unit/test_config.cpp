#include <gtest/gtest.h>

#include "terra/common/error.hpp"
#include "terra/config/config.hpp"

using namespace terra;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto cfg = parse_config_text(
      "features: {k: 12, max_points: 900}\n"
      "sgp: {lengthscales: [0.3, 0.3, 2, 2], noise: 0.02}\n"
      "terrain: {kind: forest, surface_noise: 0.01}\n"
      "run: {frames: 8}\n");
  EXPECT_EQ(cfg.method.features.k, 12);
  EXPECT_EQ(cfg.method.features.max_points, 900u);
  EXPECT_EQ(cfg.method.kernel.lengthscales, Vector4(0.3, 0.3, 2, 2));
  EXPECT_EQ(cfg.method.kernel.noise, 0.02);
  EXPECT_EQ(cfg.terrain.kind, TerrainKind::forest);
  EXPECT_EQ(cfg.frames, 8u);
  EXPECT_EQ(cfg.method.m_ind, 125u);
  EXPECT_EQ(parse_config_text("sgp: {lengthscales: 0.5}").method.kernel.lengthscales, Vector4::Constant(0.5));
}

TEST(Config, ErrorsNameTheKeyPath) {
  EXPECT_NE(config_error("features: {kk: 3}").find("features.kk"), std::string::npos);
  EXPECT_NE(config_error("features: {k: 2}").find("features.k"), std::string::npos);
  EXPECT_NE(config_error("sgp: {lengthscales: [1, 2]}").find("sgp.lengthscales"), std::string::npos);
  EXPECT_NE(config_error("fusion: {w_kappa: 0.9}").find("fusion.w_kappa"), std::string::npos);
  EXPECT_NE(config_error("terrain: {kind: urban}").find("terrain.kind"), std::string::npos);
  EXPECT_NE(config_error("sensor: {radius: abc}").find("sensor.radius"), std::string::npos);
  EXPECT_NE(config_error("bogus: 1").find("bogus"), std::string::npos);
}

TEST(Manifest, ScenariosAndMethods) {
  const auto m = parse_manifest_text(
      "pipeline: {run: {frames: 5}}\n"
      "scenarios:\n"
      "  - {kind: hilly, seeds: [1, 2]}\n"
      "  - {kind: ruin, seed_start: 10, count: 3}\n"
      "methods:\n"
      "  - fsgp-bgk\n"
      "  - {method: sgp-baseline, label: sgp@50, m_ind: 50}\n");
  ASSERT_EQ(m.scenarios.size(), 5u);
  EXPECT_EQ(m.scenarios[2].terrain.kind, TerrainKind::ruin);
  EXPECT_EQ(m.scenarios[4].terrain.seed, 12u);
  ASSERT_EQ(m.methods.size(), 2u);
  EXPECT_EQ(m.methods[0].label, "fsgp-bgk");
  EXPECT_EQ(m.methods[0].m_ind, 125u);
  EXPECT_EQ(m.methods[1].label, "sgp@50");
  EXPECT_EQ(m.methods[1].m_ind, 50u);
  EXPECT_EQ(m.pipeline.frames, 5u);
  EXPECT_THROW(parse_manifest_text("scenarios: []\nmethods: [fsgp, fsgp]\n"), Error);
}
