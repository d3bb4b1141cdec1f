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

#ifndef SUBGRAPE_OPTIMIZER_HPP
#define SUBGRAPE_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subgrape/error.hpp"
#include "subgrape/model.hpp"
#include "subgrape/robust.hpp"

namespace subgrape {

enum class Method {
    /// u <- u + eps grad Phi with a scalar eps that doubles on success and
    /// halves on failure.
    steepest,
    /// Limited-memory BFGS direction with the same accept-if-better rule.
    quasi_newton,
};

enum class Status {
    converged,       // gradient below tolerance
    target_reached,  // infidelity below target
    iteration_cap,
    stalled,         // line search exhausted
};

const char *to_string(Method m);
const char *to_string(Status s);

struct OptimizerConfig {
    Method method = Method::steepest;
    double initial_step = 1.0;
    double grow = 2.0;
    double shrink = 0.5;
    int max_iterations = 2000;
    double target_infidelity = 1e-12;
    /// Stop once max|dPhi/du| falls below this (ns/rad).
    double gradient_norm_tolerance = 1e-10;
    int max_line_search_steps = 40;
    /// Armijo constant: a trial is accepted only if Phi rises by at least
    /// this fraction of the first-order prediction. Zero accepts any rise,
    /// which lets a step that mirrors the iterate across a symmetric
    /// optimum be accepted indefinitely for a vanishing gain.
    double sufficient_increase = 0.1;
    int restarts = 1;
    uint64_t seed = 1;
    /// Half-width of the uniform random start (rad/ns). Zero picks
    /// pi / (free pulse duration).
    double initial_amplitude = 0.0;
    std::optional<double> amplitude_bound;
    int memory = 10;
    /// Skip remaining restarts once one reaches the target.
    bool stop_at_target = true;

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double fidelity = 0.0;
    double step = 0.0;
    double gradient_norm = 0.0;
};

struct RunSummary {
    uint64_t seed = 0;
    Status status = Status::iteration_cap;
    double fidelity = 0.0;
    int iterations = 0;
};

struct OptimizationResult {
    Pulse pulse;
    double fidelity = 0.0;
    Status status = Status::iteration_cap;
    std::vector<IterationRecord> history;
    int fidelity_evaluations = 0;
    int gradient_evaluations = 0;
    /// One entry per restart, in run order.
    std::vector<RunSummary> runs;

    double infidelity() const { return 1.0 - fidelity; }
};

/// Raised when the objective turns non-finite mid-run. Carries the state
/// reached before the failure.
class OptimizationAborted : public NumericalError {
   public:
    OptimizationAborted(const std::string &what, OptimizationResult partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    const OptimizationResult &partial() const { return partial_; }

   private:
    OptimizationResult partial_;
};

using ProgressCallback = std::function<void(const IterationRecord &)>;

/// Uniform amplitudes in [-scale, scale] on free pixels, zero on padding.
/// Deterministic in `seed`.
Pulse random_initial_pulse(const ControlProblem &problem, double amplitude_scale, uint64_t seed);

OptimizationResult optimize(const Objective &objective, const OptimizerConfig &config,
                            const Pulse &initial, const ProgressCallback &progress = {});

/// Starts from random_initial_pulse(problem, amplitude, config.seed).
OptimizationResult optimize(const Objective &objective, const OptimizerConfig &config,
                            const ProgressCallback &progress = {});

/// config.restarts runs seeded config.seed, config.seed + 1, ...; the first
/// run starts from `warm_start` when given. Returns the best run with all
/// runs summarized.
OptimizationResult multistart(const Objective &objective, const OptimizerConfig &config,
                              const std::optional<Pulse> &warm_start = std::nullopt,
                              const ProgressCallback &progress = {});

}  // namespace subgrape

#endif
