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

#include "subgrape/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "subgrape/error.hpp"

namespace subgrape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

Matrix basis_op(int n, int row, int col, Complex value = 1.0) {
    Matrix m = Matrix::Zero(n, n);
    m(row, col) = value;
    return m;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Qubit basis {|0>, |1>}; sigma_minus lowers |1> to |0>.
Matrix sigma_minus() { return basis_op(2, 0, 1); }
Matrix sigma_plus() { return basis_op(2, 1, 0); }
Matrix sigma_x() { return sigma_minus() + sigma_plus(); }
Matrix sigma_y() { return kI * sigma_plus() - kI * sigma_minus(); }

Matrix qutrit_x_target() {
    Matrix u = Matrix::Zero(3, 3);
    u(0, 1) = 1.0;
    u(1, 0) = 1.0;
    u(2, 2) = 1.0;
    return u;
}

Matrix qutrit_projector() {
    Matrix p = Matrix::Zero(3, 3);
    p(0, 0) = 1.0;
    p(1, 1) = 1.0;
    return p;
}

TimeGrid make_grid(int pixels, double pixel_ns, int n_sub, bool left_edge) {
    TimeGrid g;
    g.pixels = pixels;
    g.pixel_width = pixel_ns;
    g.n_sub = n_sub;
    g.sample_at_left_edge = left_edge;
    return g;
}

}  // namespace

int pixels_for_gate_time(double gate_time_ns, double pixel_ns) {
    if (!(gate_time_ns > 0.0) || !(pixel_ns > 0.0)) {
        throw InvalidArgument("gate_time_ns", "gate time and pixel width must be positive");
    }
    double ratio = gate_time_ns / pixel_ns;
    long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - n) > 1e-9 * ratio) {
        throw InvalidArgument("gate_time_ns", "gate time must be a whole number of pixels");
    }
    return static_cast<int>(n);
}

Matrix oscillator_lowering() {
    Matrix g = Matrix::Zero(3, 3);
    g(0, 1) = 1.0;
    g(1, 2) = std::sqrt(2.0);
    return g;
}

Matrix target_sqrt_iswap() {
    Matrix u = Matrix::Zero(4, 4);
    const double r = 1.0 / std::sqrt(2.0);
    u(0, 0) = 1.0;
    u(3, 3) = 1.0;
    u(1, 1) = r;
    u(2, 2) = r;
    u(1, 2) = kI * r;
    u(2, 1) = kI * r;
    return u;
}

ControlProblem build_example1_rwa(const Example1Params &params) {
    const Matrix gamma = oscillator_lowering();
    ControlProblem p;
    p.drift = GeneratorSampler::constant(basis_op(3, 2, 2, kTwoPi * params.delta_ghz));
    p.controls.push_back(GeneratorSampler::constant(0.5 * (gamma + gamma.adjoint())));
    p.controls.push_back(GeneratorSampler::constant(0.5 * (kI * gamma - kI * gamma.adjoint())));
    p.target = qutrit_x_target();
    p.projector = qutrit_projector();
    p.subspace_dim = 2;
    p.transfers = {params.transfer, params.transfer};
    p.padding = params.transfer.padding(params.pixel_ns);
    int free = pixels_for_gate_time(params.gate_time_ns, params.pixel_ns);
    p.grid = make_grid(free + 2 * p.padding, params.pixel_ns, params.n_sub, params.sample_at_left_edge);
    return p;
}

ControlProblem build_example2_nonrwa(const Example2Params &params) {
    const Matrix gamma = oscillator_lowering();
    const double omega1 = kTwoPi * params.omega1_ghz;

    // Gamma (1 + e^{-2i(omega1 t + psi)}) with coefficient c, plus h.c., over 2.
    auto rotating = [gamma, omega1](Complex c) {
        GeneratorSampler g;
        g.time_dependent = true;
        g.phase_dependent = true;
        g.sample = [gamma, omega1, c](double t, double psi) {
            Complex factor = 1.0 + std::polar(1.0, -2.0 * (omega1 * t + psi));
            Matrix a = c * factor * gamma;
            return Matrix(0.5 * (a + a.adjoint()));
        };
        return g;
    };

    ControlProblem p;
    p.drift = GeneratorSampler::constant(basis_op(3, 2, 2, kTwoPi * params.delta_ghz));
    p.controls.push_back(rotating(1.0));
    p.controls.push_back(rotating(kI));
    p.target = qutrit_x_target();
    p.projector = qutrit_projector();
    p.subspace_dim = 2;
    p.transfers = {TransferSpec::piecewise_constant(), TransferSpec::piecewise_constant()};
    p.padding = 0;
    p.phase_period = std::numbers::pi;
    int free = pixels_for_gate_time(params.gate_time_ns, params.pixel_ns);
    p.grid = make_grid(free, params.pixel_ns, params.n_sub, params.sample_at_left_edge);
    return p;
}

ControlProblem build_example3_multitone(const Example3Params &params) {
    const double coupling = kTwoPi * params.coupling_ghz;
    const double delta = kTwoPi * params.delta_ghz;
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix plus1 = kron(sigma_plus(), id2);
    const Matrix exchange = kron(sigma_plus(), sigma_minus());

    ControlProblem p;
    p.drift.time_dependent = true;
    p.drift.sample = [=](double t, double) {
        Matrix a = coupling * std::polar(1.0, delta * t) * exchange;
        return Matrix(a + a.adjoint());
    };

    // (c sigma_+ e^{-i delta t / 2} + h.c.) / 2 on the first qubit.
    auto first_qubit = [=](Complex c) {
        GeneratorSampler g;
        g.time_dependent = true;
        g.sample = [=](double t, double) {
            Matrix a = c * std::polar(1.0, -0.5 * delta * t) * plus1;
            return Matrix(0.5 * (a + a.adjoint()));
        };
        return g;
    };
    p.controls.push_back(first_qubit(1.0));
    p.controls.push_back(first_qubit(kI));
    p.controls.push_back(GeneratorSampler::constant(0.5 * kron(id2, sigma_x())));
    p.controls.push_back(GeneratorSampler::constant(0.5 * kron(id2, sigma_y())));

    p.target = target_sqrt_iswap();
    p.projector = Matrix::Identity(4, 4);
    p.subspace_dim = 4;
    p.transfers.assign(4, TransferSpec::piecewise_constant());
    p.padding = 0;
    int free = pixels_for_gate_time(params.gate_time_ns, params.pixel_ns);
    p.grid = make_grid(free, params.pixel_ns, params.n_sub, params.sample_at_left_edge);
    return p;
}

PhaseEnsemble default_phase_ensemble(const ControlProblem &problem, int size) {
    if (!problem.phase_period) {
        return PhaseEnsemble::single(0.0);
    }
    return PhaseEnsemble::uniform(size, *problem.phase_period);
}

}  // namespace subgrape
