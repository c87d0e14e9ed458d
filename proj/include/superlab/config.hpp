// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "superlab/model.hpp"
#include "superlab/particle.hpp"
#include "superlab/quadrature.hpp"

namespace superlab {

/// One experiment run, read from a JSON file with four flat sections:
///
///   model:      preset, beta, a, b, c, d, c1, c2, atoms, initial_mass,
///               initial_position
///   sim:        epsilon, max_particles, seed, observation_times, scheme
///   experiment: name, paths, workers, observables, burn_in,
///               quadrature_order, oracle_points
///   output:     dir, svg
///
/// Every key is optional except model.preset. Unknown keys are errors.
struct ExperimentConfig {
  std::string experiment = "moments";
  std::string preset;
  PresetParams params;
  SimConfig sim;
  std::size_t n_paths = 1000;
  unsigned workers = 0;  ///< 0 selects the hardware concurrency
  std::vector<std::string> observables{"mass"};
  double burn_in = 2.0;
  QuadratureSpec quad;
  std::vector<Point> oracle_points;
  std::string out_dir = "out";
  bool svg = false;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of the effective configuration (sorted keys, every
/// field present). Overrides applied after loading are reflected here.
std::string canonical_config(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string config_hash(const ExperimentConfig& cfg);
std::string model_hash(const ModelSpec& spec);

ModelSpec build_model(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();

/// Observable tokens:
///   mass | phi0 | x<k> (k = 1..d) | default | c0
///   ball:r=R[,x=X]      gaussian:amp=A,rate=R[,x=X]
///   resolvent:q=Q,amp=A,rate=R[,x=X]
/// X is the centre along the first axis (other axes at 0). "default" is
/// the SLLN suite (ball r=1, gaussian amp=1 rate=1, phi0); "c0" is the
/// Gaussian C_0 suite used by the Feller check.
struct ObservableToken {
  std::string kind;
  double q = 0.0;
  double amp = 1.0;
  double rate = 1.0;
  double radius = 1.0;
  double center = 0.0;
  int axis = 0;
};

/// Expands suite names and parses every token. ConfigError on bad syntax.
std::vector<ObservableToken> parse_observables(const std::vector<std::string>& tokens, int d);

}  // namespace superlab
