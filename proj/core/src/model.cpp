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

#include "subgrape/model.hpp"

#include <cmath>
#include <sstream>

#include "subgrape/error.hpp"

namespace subgrape {

GeneratorSampler GeneratorSampler::constant(Matrix m) {
    GeneratorSampler g;
    g.sample = [m = std::move(m)](double, double) { return m; };
    return g;
}

bool ControlProblem::phase_dependent() const {
    if (drift.phase_dependent) {
        return true;
    }
    for (const auto &c : controls) {
        if (c.phase_dependent) {
            return true;
        }
    }
    for (const auto &t : transfers) {
        if (t.phase_dependent()) {
            return true;
        }
    }
    return false;
}

int ControlProblem::required_padding() const {
    int p = 0;
    for (const auto &t : transfers) {
        p = std::max(p, t.padding(grid.pixel_width));
    }
    return p;
}

Pulse Pulse::zeros(const ControlProblem &problem) {
    Pulse p;
    p.values = Eigen::MatrixXd::Zero(problem.num_controls(), problem.grid.pixels);
    p.padding = problem.padding;
    return p;
}

Eigen::MatrixXd Pulse::free_values() const {
    return values.middleCols(padding, free_pixels());
}

Pulse Pulse::repadded(int new_padding) const {
    Pulse p;
    p.padding = new_padding;
    p.values = Eigen::MatrixXd::Zero(controls(), free_pixels() + 2 * new_padding);
    p.values.middleCols(new_padding, free_pixels()) = free_values();
    return p;
}

bool Pulse::padding_is_zero() const {
    if (padding == 0) {
        return true;
    }
    return values.leftCols(padding).isZero(0.0) && values.rightCols(padding).isZero(0.0);
}

Matrix sample_hamiltonian(const ControlProblem &problem, std::span<const double> s, int l,
                          double psi) {
    if (l < 0 || l >= problem.grid.sub_pixels()) {
        throw InvalidArgument("l", "sub-pixel index out of range");
    }
    if (static_cast<int>(s.size()) != problem.num_controls()) {
        throw InvalidArgument("s", "expected one field sample per control");
    }
    double t = problem.grid.sample_time(l);
    Matrix h = problem.drift(t, psi);
    for (size_t k = 0; k < s.size(); k++) {
        if (!std::isfinite(s[k])) {
            throw InvalidArgument("s", "field sample is not finite");
        }
        if (s[k] != 0.0) {
            h += s[k] * problem.controls[k](t, psi);
        }
    }
    return h;
}

void ProblemDiagnostics::throw_if_invalid() const {
    if (!issues.empty()) {
        throw InvalidArgument(issues.front().field, issues.front().message);
    }
}

ProblemDiagnostics validate_problem(const ControlProblem &problem) {
    ProblemDiagnostics d;
    auto issue = [&](std::string field, std::string message) {
        d.issues.push_back({std::move(field), std::move(message)});
    };

    const TimeGrid &g = problem.grid;
    if (g.pixels < 1 || g.n_sub < 1 || !(g.pixel_width > 0.0) || !std::isfinite(g.pixel_width)) {
        issue("TimeGrid", "pixels >= 1, n_sub >= 1 and a positive finite pixel_width are required");
    } else if (std::abs(g.sub_pixels() * g.sub_width() - g.duration()) > 1e-12 * g.duration()) {
        issue("TimeGrid", "sub-pixels do not tile the pulse window");
    }

    int n = problem.dim();
    if (n < 2 || problem.target.rows() != problem.target.cols()) {
        issue("U_ideal", "target must be square with dimension >= 2");
        return d;
    }
    if (problem.projector.rows() != n || problem.projector.cols() != n) {
        issue("P_Q", "projector dimension does not match the target");
        return d;
    }

    const Matrix &p = problem.projector;
    d.projector_residual = std::max(max_abs(p * p - p), hermitian_residual(p));
    d.projector_trace = p.trace().real();
    if (d.projector_residual > 1e-12) {
        issue("P_Q", "projector is not a Hermitian idempotent");
    }
    if (std::abs(d.projector_trace - problem.subspace_dim) > 1e-9) {
        std::ostringstream msg;
        msg << "projector trace " << d.projector_trace << " differs from d_Q = " << problem.subspace_dim;
        issue("P_Q", msg.str());
    }
    Matrix restricted = p * problem.target.adjoint() * problem.target * p;
    d.target_unitarity_residual = max_abs(restricted - p);
    if (d.target_unitarity_residual > 1e-12) {
        issue("U_ideal", "target is not unitary on the computational subspace");
    }

    if (!problem.drift.sample) {
        issue("drift", "missing sampler");
        return d;
    }
    if (problem.transfers.size() != problem.controls.size()) {
        issue("transfer_specs", "need exactly one transfer per control");
    }
    for (size_t k = 0; k < problem.transfers.size(); k++) {
        try {
            problem.transfers[k].validate();
        } catch (const InvalidArgument &e) {
            issue("transfer_specs[" + std::to_string(k) + "]", e.what());
        }
        if (problem.transfers[k].kind == TransferKind::fourier) {
            if (static_cast<int>(problem.transfers[k].frequencies.size()) != g.pixels) {
                issue("transfer_specs[" + std::to_string(k) + "]",
                      "fourier transfer needs one frequency per pulse column");
            }
            if (problem.padding != 0) {
                issue("transfer_specs[" + std::to_string(k) + "]",
                      "fourier transfer cannot be combined with zero padding");
            }
        }
    }
    if (problem.padding < problem.required_padding() && problem.padding >= 0) {
        std::ostringstream msg;
        msg << "padding " << problem.padding << " is below the " << problem.required_padding()
            << " pixels the transfers require";
        issue("padding", msg.str());
    }
    if (problem.padding < 0 || (g.pixels >= 1 && problem.free_pixels() < 1)) {
        issue("padding", "no free pixels remain after padding");
    }
    if (problem.subspace_dim < 1 || problem.subspace_dim > n) {
        issue("d_Q", "subspace dimension out of range");
    }

    // Sample every generator on the grid (and at a few phases when relevant).
    std::vector<double> phases{0.0};
    if (problem.phase_dependent()) {
        if (!problem.phase_period || !(*problem.phase_period > 0.0)) {
            issue("phase_period", "phase-dependent problems need a positive phase period");
        } else {
            phases.push_back(*problem.phase_period / 3.0);
            phases.push_back(0.7 * *problem.phase_period);
        }
    }
    auto check = [&](const GeneratorSampler &s, const std::string &field) {
        if (!s.sample) {
            issue(field, "missing sampler");
            return;
        }
        int count = s.time_dependent && g.sub_pixels() > 0 ? g.sub_pixels() : 1;
        for (double psi : s.phase_dependent ? phases : std::vector<double>{0.0}) {
            for (int l = 0; l < count; l++) {
                Matrix h = s(g.sample_time(l), psi);
                if (h.rows() != n || h.cols() != n) {
                    issue(field, "generator dimension does not match the target");
                    return;
                }
                double r = h.allFinite() ? hermitian_residual(h) : INFINITY;
                d.hermitian_residual = std::max(d.hermitian_residual, r);
                if (!(r <= kHermitianTolerance)) {
                    issue(field, "generator is not Hermitian at t = " + std::to_string(g.sample_time(l)));
                    return;
                }
            }
        }
    };
    check(problem.drift, "drift");
    for (size_t k = 0; k < problem.controls.size(); k++) {
        check(problem.controls[k], "controls[" + std::to_string(k) + "]");
    }
    return d;
}

void check_pulse(const ControlProblem &problem, const Pulse &pulse) {
    if (pulse.controls() != problem.num_controls() || pulse.pixels() != problem.grid.pixels) {
        std::ostringstream msg;
        msg << "expected " << problem.num_controls() << "x" << problem.grid.pixels << " amplitudes, got "
            << pulse.controls() << "x" << pulse.pixels();
        throw InvalidArgument("pulse", msg.str());
    }
    if (pulse.padding != problem.padding) {
        throw InvalidArgument("pulse", "padding does not match the problem");
    }
    if (!pulse.values.allFinite()) {
        throw InvalidArgument("pulse", "amplitudes must be finite");
    }
    if (!pulse.padding_is_zero()) {
        throw InvalidArgument("pulse", "padded pixels must be zero");
    }
}

}  // namespace subgrape
