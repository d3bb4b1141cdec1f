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

#include "subgrape/engine.hpp"

#include <cmath>

#include "subgrape/error.hpp"

namespace subgrape {

namespace {

constexpr Complex kI{0.0, 1.0};

// (e^{-i a dt} - e^{-i b dt}) / (a - b), written as a centred phase times a
// sinc so it stays accurate as a -> b. Below the threshold the gap is
// dropped and the coincident limit -i dt e^{-i a dt} is used.
Complex divided_phase_difference(double a, double b, double dt) {
    double gap = a - b;
    Complex centre = std::polar(1.0, -0.5 * (a + b) * dt);
    if (std::abs(gap) * dt < kDegeneracyThreshold) {
        return -kI * dt * centre;
    }
    double half = 0.5 * gap * dt;
    return -kI * dt * centre * (std::sin(half) / half);
}

// phi[m][n] such that <m| dU/ds |n> = <m|H_k|n> phi[m][n].
Matrix derivative_weights(const EigenDecomposition &eig, double dt) {
    Eigen::Index n = eig.values.size();
    Matrix phi(n, n);
    for (Eigen::Index a = 0; a < n; a++) {
        phi(a, a) = -kI * dt * std::polar(1.0, -eig.values[a] * dt);
        for (Eigen::Index b = a + 1; b < n; b++) {
            phi(a, b) = divided_phase_difference(eig.values[a], eig.values[b], dt);
            phi(b, a) = phi(a, b);
        }
    }
    return phi;
}

Matrix slice_hamiltonian(const SampledProblem &sampled, const Eigen::MatrixXd &fields, int l) {
    Matrix h = sampled.drift(l);
    for (Eigen::Index k = 0; k < fields.rows(); k++) {
        double s = fields(k, l);
        if (s != 0.0) {
            h += s * sampled.control(static_cast<int>(k), l);
        }
    }
    return h;
}

std::vector<Matrix> sample_on_grid(const GeneratorSampler &g, const TimeGrid &grid, double psi) {
    std::vector<Matrix> out;
    if (!g.time_dependent) {
        out.push_back(g(grid.sample_time(0), psi));
        return out;
    }
    out.reserve(grid.sub_pixels());
    for (int l = 0; l < grid.sub_pixels(); l++) {
        out.push_back(g(grid.sample_time(l), psi));
    }
    return out;
}

void require_finite(const Eigen::MatrixXd &fields) {
    if (!fields.allFinite()) {
        throw NumericalError("field samples are not finite");
    }
}

}  // namespace

SampledProblem::SampledProblem(const ControlProblem &problem, double psi)
    : problem_(problem), psi_(psi) {
    if (problem.transfers.size() != problem.controls.size()) {
        throw InvalidArgument("transfer_specs", "need exactly one transfer per control");
    }
    transfers_.reserve(problem.transfers.size());
    for (const auto &spec : problem.transfers) {
        transfers_.push_back(build_transfer(spec, problem.grid, psi));
        if (transfers_.back().cols() != problem.grid.pixels) {
            throw InvalidArgument("transfer_specs", "transfer column count differs from the pulse width");
        }
    }
    drift_ = sample_on_grid(problem.drift, problem.grid, psi);
    for (const auto &c : problem.controls) {
        controls_.push_back(sample_on_grid(c, problem.grid, psi));
    }
}

Eigen::MatrixXd SampledProblem::fields(const Pulse &pulse) const {
    check_pulse(problem_, pulse);
    Eigen::MatrixXd s(problem_.num_controls(), problem_.grid.sub_pixels());
    for (int k = 0; k < problem_.num_controls(); k++) {
        s.row(k) = transfers_[k].apply(pulse.values.row(k).transpose()).transpose();
    }
    return s;
}

PropagationRecord propagate(const SampledProblem &sampled, const Pulse &pulse, bool with_backward) {
    const auto &grid = sampled.problem().grid;
    const int slices = grid.sub_pixels();
    const double dt = grid.sub_width();
    const int n = sampled.problem().dim();

    PropagationRecord rec;
    rec.psi = sampled.psi();
    rec.fields = sampled.fields(pulse);
    require_finite(rec.fields);
    rec.eigs.reserve(slices);
    rec.propagators.reserve(slices);
    rec.forward.reserve(slices + 1);
    rec.forward.push_back(Matrix::Identity(n, n));
    for (int l = 0; l < slices; l++) {
        rec.eigs.push_back(eig_hermitian(slice_hamiltonian(sampled, rec.fields, l)));
        rec.propagators.push_back(expm_from_eig(rec.eigs.back(), dt));
        rec.forward.push_back(rec.propagators.back() * rec.forward.back());
    }
    if (with_backward) {
        rec.backward.assign(slices, Matrix::Identity(n, n));
        for (int l = slices - 2; l >= 0; l--) {
            rec.backward[l] = rec.backward[l + 1] * rec.propagators[l + 1];
        }
    }
    return rec;
}

PropagationRecord propagate(const ControlProblem &problem, const Pulse &pulse, double psi) {
    return propagate(SampledProblem(problem, psi), pulse);
}

double fidelity(const ControlProblem &problem, const Matrix &final_unitary) {
    Complex g = frobenius_overlap(problem.target, final_unitary, problem.projector);
    double d = problem.subspace_dim;
    return std::norm(g) / (d * d);
}

double fidelity(const ControlProblem &problem, const PropagationRecord &record) {
    return fidelity(problem, record.final_unitary());
}

Matrix exact_step_derivative(const EigenDecomposition &eig, const Matrix &control, double dt) {
    Matrix g = eig.vectors.adjoint() * control * eig.vectors;
    Matrix d = g.cwiseProduct(derivative_weights(eig, dt));
    return eig.vectors * d * eig.vectors.adjoint();
}

GradientResult gradient(const SampledProblem &sampled, const Pulse &pulse, const EngineOptions &options) {
    const ControlProblem &problem = sampled.problem();
    PropagationRecord rec = propagate(sampled, pulse, true);
    const int slices = rec.slices();
    const int controls = problem.num_controls();
    const double dt = problem.grid.sub_width();
    const double d = problem.subspace_dim;

    // g = Tr(U_ideal^dagger U P) = Tr(P U_ideal^dagger U)
    Matrix pu = problem.projector * problem.target.adjoint();
    Complex g = trace_of_product(pu, rec.final_unitary());
    Complex g_conj = std::conj(g);
    const double scale = 2.0 / (d * d);

    Eigen::MatrixXd grad_s(controls, slices);
    for (int l = 0; l < slices; l++) {
        // dg/ds = Tr(X_l dU_l/ds) with X_l = F_l P U_ideal^dagger B_l.
        Matrix x = rec.forward[l] * pu * rec.backward[l];
        if (options.derivative == DerivativeMode::exact) {
            const auto &eig = rec.eigs[l];
            Matrix y = eig.vectors.adjoint() * x * eig.vectors;
            Matrix weighted = y.transpose().cwiseProduct(derivative_weights(eig, dt));
            for (int k = 0; k < controls; k++) {
                Matrix hk = eig.vectors.adjoint() * sampled.control(k, l) * eig.vectors;
                Complex dg = weighted.cwiseProduct(hk).sum();
                grad_s(k, l) = scale * std::real(g_conj * dg);
            }
        } else {
            Matrix z = rec.propagators[l] * x;
            for (int k = 0; k < controls; k++) {
                Complex dg = -kI * dt * trace_of_product(z, sampled.control(k, l));
                grad_s(k, l) = scale * std::real(g_conj * dg);
            }
        }
    }

    GradientResult out;
    out.fidelity = std::norm(g) / (d * d);
    out.grad_u.resize(controls, problem.grid.pixels);
    for (int k = 0; k < controls; k++) {
        out.grad_u.row(k) = sampled.transfers()[k].apply_transpose(grad_s.row(k).transpose()).transpose();
    }
    if (problem.padding > 0) {
        out.grad_u.leftCols(problem.padding).setZero();
        out.grad_u.rightCols(problem.padding).setZero();
    }
    if (!out.grad_u.allFinite() || !std::isfinite(out.fidelity)) {
        throw NumericalError("gradient evaluation produced non-finite values");
    }
    if (options.keep_field_gradient) {
        out.grad_s = std::move(grad_s);
    }
    return out;
}

GradientResult gradient(const ControlProblem &problem, const Pulse &pulse, double psi,
                        const EngineOptions &options) {
    return gradient(SampledProblem(problem, psi), pulse, options);
}

double evaluate(const SampledProblem &sampled, const Pulse &pulse) {
    const auto &grid = sampled.problem().grid;
    const int n = sampled.problem().dim();
    Eigen::MatrixXd fields = sampled.fields(pulse);
    require_finite(fields);
    Matrix u = Matrix::Identity(n, n);
    for (int l = 0; l < grid.sub_pixels(); l++) {
        u = expm_from_eig(eig_hermitian(slice_hamiltonian(sampled, fields, l)), grid.sub_width()) * u;
    }
    return fidelity(sampled.problem(), u);
}

double evaluate_on_fine_grid(const ControlProblem &problem, const Pulse &pulse, double psi,
                             int refinement) {
    if (refinement < 2) {
        throw InvalidArgument("refinement", "fine-grid refinement must be at least 2");
    }
    ControlProblem fine = problem;
    fine.grid = problem.grid.refined(refinement);
    return evaluate(SampledProblem(fine, psi), pulse);
}

}  // namespace subgrape
