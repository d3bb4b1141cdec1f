// Copyright 2026 The Subgrape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SUBGRAPE_CLI_COMMANDS_HPP
#define SUBGRAPE_CLI_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "subgrape/optimizer.hpp"

namespace subgrape::cli {

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> scenario;
    std::optional<std::string> out;
    std::optional<uint64_t> seed;
    std::optional<int> refinement;
    std::optional<int> restarts;
    bool sample_at_left_edge = false;
    std::optional<std::string> pulse;
};

/// Reads the config (or scenario defaults), applies overrides, and
/// re-validates the result.
RunConfig load_config(const Overrides &o);

/// One optimized point of a run or sweep.
struct PointResult {
    std::string axis;  // "" for a plain optimize
    double value = 0.0;
    ControlProblem problem;
    PhaseEnsemble ensemble;
    OptimizationResult result;
    /// Ensemble-weighted fidelity on the refined grid, and per phase.
    double fine_fidelity = 0.0;
    std::vector<double> fine_per_phase;
};

struct EvaluationReport {
    double training_fidelity = 0.0;
    double training_fine_fidelity = 0.0;
    double evaluation_fidelity = 0.0;
    double evaluation_fine_fidelity = 0.0;
    std::vector<double> evaluation_fine_per_phase;
    PhaseEnsemble ensemble;
};

/// Fine-grid fidelity averaged over the ensemble, and per phase.
std::pair<double, std::vector<double>> fine_grid_fidelity(const ControlProblem &problem, const Pulse &pulse,
                                                          const PhaseEnsemble &ensemble, int refinement);

PointResult run_optimize(const RunConfig &c, std::ostream &log);
std::vector<PointResult> run_sweep(const RunConfig &c, std::ostream &log);
EvaluationReport run_evaluate(const RunConfig &c, const Pulse &pulse, std::ostream &log);

/// Command entry points: write the bundle and return the process exit code.
int command_optimize(const Overrides &o, std::ostream &out, std::ostream &err);
int command_sweep(const Overrides &o, std::ostream &out, std::ostream &err);
int command_evaluate(const Overrides &o, std::ostream &out, std::ostream &err);
int command_validate(const Overrides &o, std::ostream &out, std::ostream &err);

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace subgrape::cli

#endif
