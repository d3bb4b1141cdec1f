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

#ifndef SUBGRAPE_ROBUST_HPP
#define SUBGRAPE_ROBUST_HPP

#include <vector>

#include "subgrape/engine.hpp"
#include "subgrape/model.hpp"

namespace subgrape {

/// Discrete measure over the carrier phase psi.
struct PhaseEnsemble {
    std::vector<double> phases;
    std::vector<double> weights;
    double period = 0.0;

    /// n equally weighted phases k * period / n, k = 0..n-1.
    static PhaseEnsemble uniform(int n, double period);
    /// A single phase with weight 1.
    static PhaseEnsemble single(double psi, double period = 0.0);

    int size() const { return static_cast<int>(phases.size()); }
    /// Throws InvalidArgument if weights are negative, do not sum to one, or
    /// a phase lies outside [0, period).
    void validate() const;
};

/// Phase-averaged fidelity sum_i w_i Phi(psi_i) and its gradient, with one
/// SampledProblem prepared per phase. Phase-independent problems collapse
/// to a single evaluation at the first phase.
class Objective {
   public:
    Objective(const ControlProblem &problem, PhaseEnsemble ensemble, EngineOptions options = {});

    const ControlProblem &problem() const { return sampled_.front().problem(); }
    const PhaseEnsemble &ensemble() const { return ensemble_; }
    bool collapsed() const { return sampled_.size() == 1; }

    double fidelity(const Pulse &pulse) const;
    GradientResult gradient(const Pulse &pulse) const;

    /// Phi(psi_i) for each ensemble phase.
    std::vector<double> per_phase_fidelity(const Pulse &pulse) const;

    /// Evaluate per-phase terms on worker threads. Results are reduced in
    /// ensemble order either way.
    void set_parallel(bool parallel) { parallel_ = parallel; }

   private:
    PhaseEnsemble ensemble_;
    EngineOptions options_;
    std::vector<SampledProblem> sampled_;
    bool parallel_ = false;
};

double robust_fidelity(const ControlProblem &problem, const Pulse &pulse, const PhaseEnsemble &ensemble);
GradientResult robust_gradient(const ControlProblem &problem, const Pulse &pulse,
                               const PhaseEnsemble &ensemble, const EngineOptions &options = {});

}  // namespace subgrape

#endif
