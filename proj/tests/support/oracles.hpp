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

// Independent reference computations used only by tests. Nothing here calls
// into the eigenbasis machinery it is meant to check.

#ifndef SUBGRAPE_TESTS_ORACLES_HPP
#define SUBGRAPE_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "subgrape/engine.hpp"
#include "subgrape/model.hpp"
#include "subgrape/transfer.hpp"

namespace subgrape::testing {

inline Matrix random_hermitian(int n, std::mt19937_64 &rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix a(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            a(i, j) = Complex(dist(rng), dist(rng));
        }
    }
    return 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(int n, std::mt19937_64 &rng) {
    Matrix h = random_hermitian(n, rng);
    return (Complex(0.0, -1.0) * h).exp();
}

/// exp(-i A dt) by a plain power series with `terms` terms.
inline Matrix taylor_expm(const Matrix &a, double dt, int terms = 20) {
    Matrix x = Complex(0.0, -dt) * a;
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k < terms; k++) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

/// d/ds exp(-i (H + s B) dt) at s = 0 via the block-triangular (Van Loan)
/// exponential, using Eigen's Pade scaling-and-squaring.
inline Matrix van_loan_derivative(const Matrix &h, const Matrix &b, double dt) {
    const Eigen::Index n = h.rows();
    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = Complex(0.0, -dt) * h;
    block.bottomRightCorner(n, n) = Complex(0.0, -dt) * h;
    block.topRightCorner(n, n) = Complex(0.0, -dt) * b;
    Matrix e = block.exp();
    return e.topRightCorner(n, n);
}

/// Classic single-grid GRAPE for time-independent generators with one
/// piecewise-constant sample per pixel. Returns dPhi/du[k][j].
inline Eigen::MatrixXd legacy_grape_gradient(const Matrix &drift, const std::vector<Matrix> &controls,
                                             const Eigen::MatrixXd &u, double dt, const Matrix &target,
                                             const Matrix &projector, int subspace_dim) {
    const int n = static_cast<int>(drift.rows());
    const int pixels = static_cast<int>(u.cols());
    const int k_count = static_cast<int>(controls.size());
    std::vector<Matrix> props;
    std::vector<Matrix> hams;
    for (int j = 0; j < pixels; j++) {
        Matrix h = drift;
        for (int k = 0; k < k_count; k++) {
            h += u(k, j) * controls[k];
        }
        hams.push_back(h);
        props.push_back((Complex(0.0, -dt) * h).exp());
    }
    auto product = [&](int from, int to) {  // U_to ... U_from, identity if empty
        Matrix p = Matrix::Identity(n, n);
        for (int j = from; j <= to; j++) {
            p = props[j] * p;
        }
        return p;
    };
    Matrix total = product(0, pixels - 1);
    Complex g = (target.adjoint() * total * projector).trace();
    double d2 = static_cast<double>(subspace_dim) * subspace_dim;
    Eigen::MatrixXd grad(k_count, pixels);
    for (int j = 0; j < pixels; j++) {
        for (int k = 0; k < k_count; k++) {
            Matrix du = product(j + 1, pixels - 1) * van_loan_derivative(hams[j], controls[k], dt) *
                        product(0, j - 1);
            Complex dg = (target.adjoint() * du * projector).trace();
            grad(k, j) = 2.0 / d2 * std::real(std::conj(g) * dg);
        }
    }
    return grad;
}

/// Central finite difference of `f` with respect to every free pulse entry.
inline Eigen::MatrixXd finite_difference_gradient(const std::function<double(const Pulse &)> &f,
                                                  const Pulse &pulse, double step = 1e-6) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(pulse.values.rows(), pulse.values.cols());
    for (Eigen::Index k = 0; k < pulse.values.rows(); k++) {
        for (Eigen::Index j = pulse.padding; j < pulse.values.cols() - pulse.padding; j++) {
            Pulse plus = pulse;
            Pulse minus = pulse;
            plus.values(k, j) += step;
            minus.values(k, j) -= step;
            grad(k, j) = (f(plus) - f(minus)) / (2.0 * step);
        }
    }
    return grad;
}

/// max|a - b| / max(max|b|, floor).
inline double relative_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b, double floor = 1e-12) {
    double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Composite Simpson rule on [a, b] with `panels` (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int panels = 20000) {
    if (panels % 2) {
        panels++;
    }
    double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; i++) {
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

/// Gaussian filter transfer element by direct time-domain convolution:
/// the impulse response of exp(-w^2/w0^2) integrated over pixel j.
inline double gaussian_transfer_by_convolution(double t, int j, double pixel_width, double omega0) {
    auto impulse = [omega0](double tau) {
        return omega0 / (2.0 * std::sqrt(std::numbers::pi)) * std::exp(-omega0 * omega0 * tau * tau / 4.0);
    };
    return simpson([&](double tp) { return impulse(t - tp); }, j * pixel_width, (j + 1) * pixel_width);
}

}  // namespace subgrape::testing

#endif
