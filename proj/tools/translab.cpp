#include <CLI11.hpp>
#include <cstdlib>
#include <fmt/format.h>
#include <iostream>

#include "translab/harness.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitChecksFailed = 3;

std::filesystem::path default_out(const translab::ExperimentConfig& cfg) {
  if (!cfg.output.empty()) return cfg.output;
  if (const char* env = std::getenv("TRANSLAB_OUT")) {
    if (*env) return env;
  }
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase transmission problem solver and verifier"};
  app.set_version_flag("--version", std::string(translab::version()));
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  for (const char* name : {"solve", "flat", "stability-sweep", "regularity-fit", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML experiment file")->required();
    sub->add_option("--out", out_dir, "output directory (default: config 'output', then $TRANSLAB_OUT, then ./out)");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  translab::ExperimentConfig cfg;
  std::filesystem::path out = out_dir;
  try {
    cfg = translab::ExperimentConfig::from_file(config_path);
    if (cfg.command.empty()) cfg.command = command;
    if (cfg.command != command) {
      throw translab::ConfigError(
          fmt::format("config is for '{}' but the command line asks for '{}'", cfg.command, command));
    }
    if (app.get_subcommands().front()->count("--seed")) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (out.empty()) out = default_out(cfg);
    cfg.validate();
  } catch (const translab::Error& e) {
    if (out.empty()) out = default_out(cfg);
    translab::write_error_record(out, e.kind(), e.what());
    std::cerr << "translab: " << e.kind() << " error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto report = translab::run_experiment(cfg, out);
    for (const auto& line : report.summary) std::cout << line << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << (out / "report.json").string() << "\n";
    return report.passed ? 0 : kExitChecksFailed;
  } catch (const translab::Error& e) {
    translab::write_error_record(out, e.kind(), e.what());
    std::cerr << "translab: " << e.kind() << " error: " << e.what() << "\n";
    return e.kind() == "config" ? kExitConfig : kExitError;
  } catch (const std::exception& e) {
    translab::write_error_record(out, "internal", e.what());
    std::cerr << "translab: " << e.what() << "\n";
    return kExitError;
  }
}
