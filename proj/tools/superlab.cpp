// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
//
// superlab <experiment> --config PATH [--seed N] [--paths N] [--out DIR] [--svg]
//
// Exit codes: 0 all checks pass, 2 configuration or domain error,
// 3 particle cap exceeded, 4 acceptance failure, 1 anything else.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "superlab/runner.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  bool svg = false;
};

void add_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override sim.seed");
  cmd->add_option("--paths", o.paths, "override experiment.paths");
  cmd->add_option("--out", o.out, "override output.dir");
  cmd->add_option("--workers", o.workers, "override experiment.workers (0 = all cores)");
  cmd->add_flag("--svg", o.svg, "also write SVG plots");
}

int run(const std::string& experiment, const Overrides& o) {
  superlab::ExperimentConfig cfg;
  try {
    cfg = superlab::load_config(o.config);
  } catch (const superlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return superlab::kExitConfig;
  }
  if (!experiment.empty()) cfg.experiment = experiment;
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.paths) cfg.n_paths = *o.paths;
  if (o.out) cfg.out_dir = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  if (o.svg) cfg.svg = true;

  const auto result = superlab::run_experiment(cfg, std::cerr);
  if (!result.message.empty()) {
    std::cerr << (result.exit_code == superlab::kExitCapacity ? "capacity error: " : "error: ")
              << result.message << '\n';
  }
  for (const auto& e : result.checks.entries) {
    const char* tag = e.status == superlab::CheckStatus::Pass   ? "PASS"
                      : e.status == superlab::CheckStatus::Fail ? "FAIL"
                                                                : "INFO";
    std::cout << tag << "  " << e.name << (e.detail.empty() ? "" : "  " + e.detail) << '\n';
  }
  for (const auto& f : result.files) std::cerr << "wrote " << f << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superlab: particle approximations of supercritical superprocesses"};
  app.set_version_flag("--version", SUPERLAB_VERSION);
  app.require_subcommand(1);

  Overrides o;
  std::string chosen;
  auto* run_cmd = app.add_subcommand("run", "run the experiment named in the config");
  add_flags(run_cmd, o);
  for (const auto& name : superlab::experiment_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_flags(cmd, o);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : superlab::kExitConfig;
  }
  try {
    return run(chosen, o);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return superlab::kExitCrash;
  }
}
