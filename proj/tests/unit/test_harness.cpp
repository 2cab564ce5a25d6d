#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "translab/harness.hpp"
#include "translab/types.hpp"

using namespace translab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("translab_test_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kSmallSolve = R"(
command: solve
dimension: 2
interface:
  family: sinusoid
  params: {amp: 0.05, freq: 2.0}
quadrature:
  surface_order: 16
  volume_order: 8
grid:
  size: 12
)";

const char* kSweep = R"(
command: stability-sweep
dimension: 2
sweep:
  eps: [0.2, 0.1, 0.05, 0.025]
  barriers: false
)";

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  const auto c = ExperimentConfig::from_yaml(kSmallSolve);
  EXPECT_EQ(c.command, "solve");
  EXPECT_EQ(c.family, "sinusoid");
  EXPECT_DOUBLE_EQ(c.family_params.at("amp"), 0.05);
  EXPECT_EQ(c.surface_order, 16);
  EXPECT_EQ(c.grid, 12);
  EXPECT_EQ(c.density, "constant");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(ExperimentConfig::from_yaml("command: solve\nbogus: 1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_yaml("command: solve\ngrid: {size: 12, pitch: 2}\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_yaml("command: solve\ndimension: two\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_yaml("command: [solve\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/translab.yaml"), ConfigError);
}

TEST(Config, ValidateRejectsOutOfRange) {
  auto bad = [](const std::string& yaml) {
    const auto c = ExperimentConfig::from_yaml(yaml);
    EXPECT_THROW(c.validate(), ConfigError) << yaml;
  };
  bad("command: nothing\n");
  bad("command: solve\ndimension: 4\n");
  bad("command: solve\ninterface: {family: spiral}\n");
  bad("command: solve\ndensity: {family: random}\n");
  bad("command: stability-sweep\nsweep: {eps: [0.6]}\n");
  bad("command: stability-sweep\nsweep: {grid: 32}\n");
  bad("command: regularity-fit\nregularity: {lambda: 0.8}\n");
  bad("command: regularity-fit\ninterface: {family: linear, params: {slope: 0.1}}\n");
  bad("command: verify\nverify: {eps: 0.1, h: 0.05}\n");
  bad("command: flat\nflat: {r: 0.5, lines: [0.45]}\n");
}

TEST(Report, SolveWritesTablesAndReport) {
  const auto dir = scratch("solve");
  const auto rep = run_experiment(ExperimentConfig::from_yaml(kSmallSolve), dir);
  EXPECT_TRUE(rep.passed);
  const auto csv = slurp(dir / "solution.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1,x2,xn,side,u,error");
  std::size_t inside = 0;
  for (int i = 0; i < 12; ++i)
    for (int k = 0; k < 12; ++k) inside += std::hypot(-1.0 + i * 2.0 / 11, -1.0 + k * 2.0 / 11) < 1.0;
  EXPECT_EQ(lines(csv), 1u + inside);
  const auto json = slurp(dir / "report.json");
  EXPECT_NE(json.find("\"provenance\""), std::string::npos);
  EXPECT_NE(json.find("\"version\""), std::string::npos);
  EXPECT_LE(rep.metric("u_max"), 1e-10);
  EXPECT_THROW(rep.metric("no_such_metric"), DomainError);
}

TEST(Report, SweepHasOneRowPerEpsilon) {
  const auto dir = scratch("sweep");
  const auto rep = run_experiment(ExperimentConfig::from_yaml(kSweep), dir);
  const auto csv = slurp(dir / "stability.csv");
  EXPECT_EQ(lines(csv), 5u);
  EXPECT_EQ(rep.metric("gap_strictly_decreasing"), 1.0);
}

TEST(Report, ByteIdenticalAcrossThreadCounts) {
  for (const char* yaml : {kSmallSolve, kSweep}) {
    auto c = ExperimentConfig::from_yaml(yaml);
    const auto a = scratch("det_a"), b = scratch("det_b");
    c.threads = 1;
    run_experiment(c, a);
    c.threads = 3;
    run_experiment(c, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
  }
}

TEST(Report, VerifyPassesOnFlat) {
  const auto dir = scratch("verify");
  auto c = ExperimentConfig::from_yaml("command: verify\nverify: {points: 100}\n");
  const auto rep = run_experiment(c, dir);
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.metric("mean_value_max"), 1e-6);
  EXPECT_LT(rep.metric("distributional_residual"), 1e-4);
  EXPECT_NE(slurp(dir / "verify.csv").find("check,value,threshold,pass"), std::string::npos);
}

TEST(Report, ErrorRecord) {
  const auto dir = scratch("error");
  write_error_record(dir, "domain", "point outside the unit ball");
  const auto json = slurp(dir / "error.json");
  EXPECT_NE(json.find("\"kind\": \"domain\""), std::string::npos);
  EXPECT_NE(json.find("point outside the unit ball"), std::string::npos);
  EXPECT_NE(json.find(version()), std::string::npos);
}
