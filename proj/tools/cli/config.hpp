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


// Run configuration for the command-line tool. JSON on disk; frequencies
// stay in GHz inside RunConfig (so the echo is exact) and are converted to
// rad/ns by build_problem.

#ifndef SUBGRAPE_CLI_CONFIG_HPP
#define SUBGRAPE_CLI_CONFIG_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "subgrape/model.hpp"
#include "subgrape/optimizer.hpp"
#include "subgrape/robust.hpp"

namespace subgrape::cli {

inline constexpr int kSchemaVersion = 1;

/// A configuration problem, located by JSON pointer ("/optimizer/seed").
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string path, const std::string &message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)), message_(message) {}
    const std::string &path() const { return path_; }
    const std::string &message() const { return message_; }

   private:
    std::string path_;
    std::string message_;
};

/// Serializable transfer description; to_spec() turns it into a TransferSpec.
struct TransferConfig {
    std::string kind = "piecewise_constant";
    std::optional<double> bandwidth_ghz;   // gaussian_filter (-3 dB), general_filter
    std::optional<double> omega0_rad_per_ns;  // gaussian_filter w0, already angular
    std::string response = "butterworth";  // general_filter: butterworth | gaussian | all_pass
    int order = 4;                         // butterworth
    std::vector<double> frequencies_ghz;   // fourier
    double carrier_ghz = 0.0;              // carrier
    std::shared_ptr<TransferConfig> base;  // carrier

    TransferSpec to_spec() const;
};

struct InlineProblem {
    Matrix drift_ghz;
    std::vector<Matrix> controls;
    Matrix target;
    Matrix projector;
    int subspace_dim = 0;
};

struct SweepConfig {
    std::string axis;  // "gate_time" or "n_sub"
    std::vector<double> values;
    /// Seed each gate-time point with the previous optimum.
    std::optional<bool> warm_start;

    bool use_warm_start() const { return warm_start.value_or(axis == "gate_time"); }
};

struct RunConfig {
    std::optional<std::string> scenario;
    std::optional<InlineProblem> problem;

    // Physics knobs of the named scenarios.
    double delta_ghz = 0.0;
    double omega1_ghz = 0.0;
    double coupling_ghz = 0.0;

    double gate_time_ns = 0.0;
    double pixel_ns = 0.0;
    int n_sub = 1;
    bool sample_at_left_edge = false;

    /// One entry per control, or a single entry applied to every control.
    std::vector<TransferConfig> transfers;
    /// Transfer used by `evaluate`; defaults to `transfers`.
    std::optional<std::vector<TransferConfig>> evaluation_transfers;

    OptimizerConfig optimizer;
    /// Uniform ensemble of this size over the problem's phase period...
    int ensemble_size = 8;
    /// ...unless explicit phases (and optional weights) are given.
    std::vector<double> ensemble_phases;
    std::vector<double> ensemble_weights;
    std::optional<SweepConfig> sweep;
    int refinement = 8;
    std::string output_dir = "out";
    std::optional<std::string> pulse_file;
    bool parallel = false;
};

/// Defaults for a named scenario ("example1", "example2", "example3").
RunConfig scenario_defaults(const std::string &name);

/// Parses and validates. Missing fields take the scenario defaults.
RunConfig parse_config(const nlohmann::json &j);

/// Fully resolved echo; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig &c);

/// Builds the control problem. Throws ConfigError for inconsistent input.
ControlProblem build_problem(const RunConfig &c, bool evaluation_transfers = false);

/// The training ensemble. Phase-independent problems get the single phase 0.
PhaseEnsemble resolved_ensemble(const RunConfig &c, const ControlProblem &problem);

/// Maps core "a.b" field names to "/a/b" pointers under `prefix`.
std::string field_to_pointer(const std::string &field, const std::string &prefix = "");

}  // namespace subgrape::cli

#endif
