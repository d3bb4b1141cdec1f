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

#include "subgrape/optimizer.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>

namespace subgrape {

namespace {

struct CurvaturePair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

Eigen::VectorXd flatten(const Eigen::MatrixXd &m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd &v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

// Two-loop recursion. Returns an ascent direction H * grad for maximizing
// Phi, with the pairs stored for the minimization of -Phi.
Eigen::VectorXd lbfgs_direction(const std::deque<CurvaturePair> &memory, const Eigen::VectorXd &grad) {
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(memory.size());
    for (size_t i = memory.size(); i-- > 0;) {
        alpha[i] = memory[i].rho * memory[i].s.dot(q);
        q -= alpha[i] * memory[i].y;
    }
    const auto &last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
    for (size_t i = 0; i < memory.size(); i++) {
        double beta = memory[i].rho * memory[i].y.dot(q);
        q += (alpha[i] - beta) * memory[i].s;
    }
    return q;
}

void clip(Pulse &pulse, const std::optional<double> &bound) {
    if (bound) {
        pulse.values = pulse.values.cwiseMax(-*bound).cwiseMin(*bound);
    }
}

std::string dump_state(const char *what, int iteration, double phi, double step, const Pulse &pulse) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at iteration " << iteration << " (last fidelity " << phi << ", step " << step
        << "); pulse:";
    for (Eigen::Index k = 0; k < pulse.values.rows(); k++) {
        msg << "\n  u[" << k << "] =";
        for (Eigen::Index j = 0; j < pulse.values.cols(); j++) {
            msg << " " << pulse.values(k, j);
        }
    }
    return msg.str();
}

double default_amplitude(const ControlProblem &problem) {
    return std::numbers::pi / (problem.free_pixels() * problem.grid.pixel_width);
}

}  // namespace

const char *to_string(Method m) {
    switch (m) {
        case Method::steepest:
            return "steepest";
        case Method::quasi_newton:
            return "quasi_newton";
    }
    return "unknown";
}

const char *to_string(Status s) {
    switch (s) {
        case Status::converged:
            return "converged";
        case Status::target_reached:
            return "target_reached";
        case Status::iteration_cap:
            return "iteration_cap";
        case Status::stalled:
            return "stalled";
    }
    return "unknown";
}

void OptimizerConfig::validate() const {
    if (!(initial_step > 0.0)) {
        throw InvalidArgument("optimizer.initial_step", "must be positive");
    }
    if (!(grow > 1.0)) {
        throw InvalidArgument("optimizer.grow", "must exceed 1");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) {
        throw InvalidArgument("optimizer.shrink", "must lie in (0, 1)");
    }
    if (max_iterations < 0) {
        throw InvalidArgument("optimizer.max_iterations", "must be non-negative");
    }
    if (!(target_infidelity > 0.0 && target_infidelity < 1.0)) {
        throw InvalidArgument("optimizer.target_infidelity", "must lie in (0, 1)");
    }
    if (!(gradient_norm_tolerance >= 0.0)) {
        throw InvalidArgument("optimizer.gradient_norm_tolerance", "must be non-negative");
    }
    if (!(sufficient_increase >= 0.0 && sufficient_increase < 1.0)) {
        throw InvalidArgument("optimizer.sufficient_increase", "must lie in [0, 1)");
    }
    if (max_line_search_steps < 1) {
        throw InvalidArgument("optimizer.max_line_search_steps", "must be at least 1");
    }
    if (restarts < 1) {
        throw InvalidArgument("optimizer.restarts", "must be at least 1");
    }
    if (!(initial_amplitude >= 0.0)) {
        throw InvalidArgument("optimizer.initial_amplitude", "must be non-negative");
    }
    if (amplitude_bound && !(*amplitude_bound > 0.0)) {
        throw InvalidArgument("optimizer.amplitude_bound", "must be positive");
    }
    if (memory < 1) {
        throw InvalidArgument("optimizer.memory", "must be at least 1");
    }
}

Pulse random_initial_pulse(const ControlProblem &problem, double amplitude_scale, uint64_t seed) {
    if (!(amplitude_scale >= 0.0)) {
        throw InvalidArgument("amplitude_scale", "must be non-negative");
    }
    Pulse p = Pulse::zeros(problem);
    if (amplitude_scale == 0.0) {
        return p;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude_scale, amplitude_scale);
    // Column-major fill: pixel by pixel, all controls per pixel.
    for (int j = problem.padding; j < problem.grid.pixels - problem.padding; j++) {
        for (int k = 0; k < problem.num_controls(); k++) {
            p.values(k, j) = dist(rng);
        }
    }
    return p;
}

OptimizationResult optimize(const Objective &objective, const OptimizerConfig &config,
                            const Pulse &initial, const ProgressCallback &progress) {
    config.validate();
    const ControlProblem &problem = objective.problem();
    check_pulse(problem, initial);

    OptimizationResult result;
    result.pulse = initial;
    clip(result.pulse, config.amplitude_bound);

    const Eigen::Index rows = result.pulse.values.rows();
    const Eigen::Index cols = result.pulse.values.cols();
    double step = config.initial_step;
    int iteration = 0;

    auto record = [&](double gnorm) {
        IterationRecord r{iteration, result.fidelity, step, gnorm};
        result.history.push_back(r);
        if (progress) {
            progress(r);
        }
    };
    auto abort = [&](const char *what) {
        throw OptimizationAborted(dump_state(what, iteration, result.fidelity, step, result.pulse), result);
    };

    GradientResult current;
    try {
        current = objective.gradient(result.pulse);
    } catch (const NumericalError &) {
        abort("non-finite objective");
    }
    result.gradient_evaluations++;
    result.fidelity = current.fidelity;
    double gnorm = current.grad_u.cwiseAbs().maxCoeff();
    record(gnorm);

    std::deque<CurvaturePair> memory;
    result.status = Status::iteration_cap;
    while (true) {
        if (1.0 - result.fidelity <= config.target_infidelity) {
            result.status = Status::target_reached;
            break;
        }
        if (gnorm < config.gradient_norm_tolerance) {
            result.status = Status::converged;
            break;
        }
        if (iteration >= config.max_iterations) {
            result.status = Status::iteration_cap;
            break;
        }
        iteration++;

        Eigen::VectorXd grad = flatten(current.grad_u);
        bool use_memory = config.method == Method::quasi_newton && !memory.empty();
        bool accepted = false;
        Pulse trial;
        double trial_phi = 0.0;
        double alpha = 0.0;
        for (int attempt = 0; attempt < 2 && !accepted; attempt++) {
            Eigen::VectorXd direction = use_memory ? lbfgs_direction(memory, grad) : grad;
            if (use_memory && !(direction.dot(grad) > 0.0)) {
                memory.clear();
                use_memory = false;
                direction = grad;
            }
            alpha = use_memory ? 1.0 : step;
            for (int ls = 0; ls < config.max_line_search_steps; ls++) {
                trial = result.pulse;
                trial.values += alpha * unflatten(direction, rows, cols);
                clip(trial, config.amplitude_bound);
                try {
                    trial_phi = objective.fidelity(trial);
                } catch (const NumericalError &) {
                    abort("non-finite objective during line search");
                }
                result.fidelity_evaluations++;
                if (!std::isfinite(trial_phi)) {
                    abort("non-finite objective during line search");
                }
                // Predicted rise uses the clipped displacement actually taken.
                double predicted = grad.dot(flatten(trial.values - result.pulse.values));
                if (trial_phi > result.fidelity &&
                    trial_phi - result.fidelity >= config.sufficient_increase * predicted) {
                    accepted = true;
                    break;
                }
                alpha *= config.shrink;
            }
            if (!accepted && use_memory) {
                // Quasi-Newton direction failed; retry once along the gradient.
                memory.clear();
                use_memory = false;
            } else {
                break;
            }
        }
        if (!accepted) {
            result.status = Status::stalled;
            iteration--;
            break;
        }

        GradientResult next;
        try {
            next = objective.gradient(trial);
        } catch (const NumericalError &) {
            abort("non-finite gradient");
        }
        result.gradient_evaluations++;

        if (config.method == Method::quasi_newton) {
            Eigen::VectorXd s = flatten(trial.values - result.pulse.values);
            Eigen::VectorXd y = grad - flatten(next.grad_u);
            double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
                memory.push_back({std::move(s), std::move(y), 1.0 / sy});
                if (static_cast<int>(memory.size()) > config.memory) {
                    memory.pop_front();
                }
            }
        }
        if (!use_memory) {
            step = alpha * config.grow;
        } else {
            step = std::max(step, alpha);
        }

        result.pulse = std::move(trial);
        result.fidelity = next.fidelity;
        current = std::move(next);
        gnorm = current.grad_u.cwiseAbs().maxCoeff();
        record(gnorm);
    }
    return result;
}

OptimizationResult optimize(const Objective &objective, const OptimizerConfig &config,
                            const ProgressCallback &progress) {
    const ControlProblem &problem = objective.problem();
    double amplitude = config.initial_amplitude > 0.0 ? config.initial_amplitude : default_amplitude(problem);
    return optimize(objective, config, random_initial_pulse(problem, amplitude, config.seed), progress);
}

OptimizationResult multistart(const Objective &objective, const OptimizerConfig &config,
                              const std::optional<Pulse> &warm_start, const ProgressCallback &progress) {
    config.validate();
    const ControlProblem &problem = objective.problem();
    double amplitude = config.initial_amplitude > 0.0 ? config.initial_amplitude : default_amplitude(problem);

    OptimizationResult best;
    std::vector<RunSummary> runs;
    int fidelity_evals = 0;
    int gradient_evals = 0;
    for (int r = 0; r < config.restarts; r++) {
        uint64_t seed = config.seed + static_cast<uint64_t>(r);
        Pulse start = (r == 0 && warm_start) ? *warm_start : random_initial_pulse(problem, amplitude, seed);
        OptimizationResult run = optimize(objective, config, start, progress);
        runs.push_back({seed, run.status, run.fidelity, static_cast<int>(run.history.size()) - 1});
        fidelity_evals += run.fidelity_evaluations;
        gradient_evals += run.gradient_evaluations;
        bool better = r == 0 || run.fidelity > best.fidelity;
        if (better) {
            best = std::move(run);
        }
        if (config.stop_at_target && best.status == Status::target_reached) {
            break;
        }
    }
    best.runs = std::move(runs);
    best.fidelity_evaluations = fidelity_evals;
    best.gradient_evaluations = gradient_evals;
    return best;
}

}  // namespace subgrape
