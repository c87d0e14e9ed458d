// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "superlab/config.hpp"
#include "superlab/output.hpp"
#include "superlab/spectral.hpp"

namespace superlab {

enum ExitCode : int {
  kExitPass = 0,
  kExitCrash = 1,
  kExitConfig = 2,
  kExitCapacity = 3,
  kExitAcceptance = 4,
};

struct RunResult {
  int exit_code = kExitPass;
  std::vector<std::string> files;  ///< paths written, in order
  ValidationReport checks;
  std::string message;             ///< error text for exit codes 2 and 3
};

/// Observables for a run. Tabulates resolvent tokens (needs sd).
struct BuiltObservables {
  std::vector<TestFunction> functions;
  std::vector<bool> resolvent_type;
};

BuiltObservables build_observables(const ExperimentConfig& cfg, const ModelSpec& spec,
                                   const SpectralData* sd);

/// Metadata block shared by every file of a run.
Metadata run_metadata(const ExperimentConfig& cfg, const ModelSpec& spec);

/// Executes cfg.experiment, writes its CSV files and summary.txt under
/// cfg.out_dir and maps errors onto exit codes. Progress goes to `log`.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace superlab
