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

#include "subgrape/robust.hpp"

#include <cmath>
#include <future>

#include "subgrape/error.hpp"

namespace subgrape {

namespace {

template <typename T, typename F>
std::vector<T> map_phases(size_t count, bool parallel, F &&f) {
    std::vector<T> out;
    out.reserve(count);
    if (!parallel || count < 2) {
        for (size_t i = 0; i < count; i++) {
            out.push_back(f(i));
        }
        return out;
    }
    std::vector<std::future<T>> jobs;
    jobs.reserve(count);
    for (size_t i = 0; i < count; i++) {
        jobs.push_back(std::async(std::launch::async, f, i));
    }
    for (auto &j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

}  // namespace

PhaseEnsemble PhaseEnsemble::uniform(int n, double period) {
    if (n < 1 || !(period > 0.0)) {
        throw InvalidArgument("ensemble", "need at least one phase and a positive period");
    }
    PhaseEnsemble e;
    e.period = period;
    for (int i = 0; i < n; i++) {
        e.phases.push_back(period * i / n);
        e.weights.push_back(1.0 / n);
    }
    return e;
}

PhaseEnsemble PhaseEnsemble::single(double psi, double period) {
    PhaseEnsemble e;
    e.phases = {psi};
    e.weights = {1.0};
    e.period = period;
    return e;
}

void PhaseEnsemble::validate() const {
    if (phases.empty() || phases.size() != weights.size()) {
        throw InvalidArgument("ensemble", "need one weight per phase and at least one phase");
    }
    double total = 0.0;
    for (size_t i = 0; i < phases.size(); i++) {
        if (!(weights[i] >= 0.0)) {
            throw InvalidArgument("ensemble.weights", "weights must be non-negative");
        }
        total += weights[i];
        if (period > 0.0 && !(phases[i] >= 0.0 && phases[i] < period)) {
            throw InvalidArgument("ensemble.phases", "phases must lie in [0, period)");
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("ensemble.weights", "weights must sum to one");
    }
}

Objective::Objective(const ControlProblem &problem, PhaseEnsemble ensemble, EngineOptions options)
    : ensemble_(std::move(ensemble)), options_(options) {
    ensemble_.validate();
    if (!problem.phase_dependent()) {
        sampled_.emplace_back(problem, ensemble_.phases.front());
        return;
    }
    sampled_.reserve(ensemble_.phases.size());
    for (double psi : ensemble_.phases) {
        sampled_.emplace_back(problem, psi);
    }
}

std::vector<double> Objective::per_phase_fidelity(const Pulse &pulse) const {
    if (collapsed()) {
        return std::vector<double>(ensemble_.phases.size(), subgrape::evaluate(sampled_[0], pulse));
    }
    return map_phases<double>(sampled_.size(), parallel_,
                              [&](size_t i) { return subgrape::evaluate(sampled_[i], pulse); });
}

double Objective::fidelity(const Pulse &pulse) const {
    if (collapsed()) {
        return subgrape::evaluate(sampled_[0], pulse);
    }
    auto values = per_phase_fidelity(pulse);
    double total = 0.0;
    for (size_t i = 0; i < values.size(); i++) {
        total += ensemble_.weights[i] * values[i];
    }
    return total;
}

GradientResult Objective::gradient(const Pulse &pulse) const {
    if (collapsed()) {
        return subgrape::gradient(sampled_[0], pulse, options_);
    }
    auto parts = map_phases<GradientResult>(
        sampled_.size(), parallel_, [&](size_t i) { return subgrape::gradient(sampled_[i], pulse, options_); });
    GradientResult out;
    out.grad_u = Eigen::MatrixXd::Zero(parts[0].grad_u.rows(), parts[0].grad_u.cols());
    if (options_.keep_field_gradient) {
        out.grad_s = Eigen::MatrixXd::Zero(parts[0].grad_s.rows(), parts[0].grad_s.cols());
    }
    for (size_t i = 0; i < parts.size(); i++) {
        double w = ensemble_.weights[i];
        out.fidelity += w * parts[i].fidelity;
        out.grad_u += w * parts[i].grad_u;
        if (options_.keep_field_gradient) {
            out.grad_s += w * parts[i].grad_s;
        }
    }
    return out;
}

double robust_fidelity(const ControlProblem &problem, const Pulse &pulse, const PhaseEnsemble &ensemble) {
    return Objective(problem, ensemble).fidelity(pulse);
}

GradientResult robust_gradient(const ControlProblem &problem, const Pulse &pulse,
                               const PhaseEnsemble &ensemble, const EngineOptions &options) {
    return Objective(problem, ensemble, options).gradient(pulse);
}

}  // namespace subgrape
