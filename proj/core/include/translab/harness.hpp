#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "translab/geometry.hpp"

namespace translab {

/// Experiment configuration. Parsed from YAML; see configs/ for the grammar.
struct ExperimentConfig {
  std::string command;  // solve | flat | stability-sweep | regularity-fit | verify
  int dimension = 2;
  std::uint64_t seed = 1;
  int threads = 1;

  std::string family = "flat";
  FamilyParams family_params;

  std::string density = "constant";  // constant | holder
  double density_value = 1.0;
  double density_base = 1.0;
  double density_amp = 0.1;
  double density_beta = 0.6;

  int surface_order = 64;
  int volume_order = 32;
  double panel_tolerance = 1e-13;
  int grid = 128;
  double ladder_t0 = 0.05;
  int ladder_rungs = 4;

  double flat_c0 = 1.0;
  double flat_a = 0.0;
  double flat_r = 1.0;
  std::vector<double> flat_lines{0.0, 0.3, -0.5};
  int flat_samples = 65;

  std::vector<double> sweep_eps{0.2, 0.1, 0.05, 0.025};
  double sweep_gamma = 0.5;
  int sweep_grid = 64;
  bool sweep_barriers = true;
  int sweep_barrier_grid = 32;

  double lambda = 0.5;
  int depth = 8;
  int samples = 200;
  double delta0 = 0.01;
  double alpha = 0.5;
  int campanato_mesh = 16;

  double verify_eps = 0.1;
  int verify_points = 1000;
  double verify_h = 0.01;
  int verify_average_order = 4;

  std::string output;

  static ExperimentConfig from_yaml(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct Metric {
  std::string name;
  double value;
  std::string operation;  // the call that produced the value
};

struct TableInfo {
  std::string name;
  std::string file;
  std::size_t rows;
};

struct ExperimentReport {
  std::string command;
  std::vector<Metric> metrics;
  std::vector<TableInfo> tables;
  std::vector<std::string> warnings;
  std::vector<std::string> summary;  // human-readable lines for the CLI
  /// False when a verification check failed (the run itself completed).
  bool passed = true;

  double metric(const std::string& name) const;
};

/// Runs the configured pipeline and writes report.json plus the command's CSV
/// tables into `out_dir` (created if needed). Outputs depend only on the config
/// and seed, never on the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Machine-readable record of a failed run.
void write_error_record(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message);

/// Library version string recorded in every report.
const char* version();

}  // namespace translab
