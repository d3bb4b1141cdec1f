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

#include "subgrape/linalg.hpp"

#include <cmath>
#include <sstream>

#include "subgrape/error.hpp"

namespace subgrape {

Matrix EigenDecomposition::reconstruct() const {
    return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

double max_abs(const Matrix &a) {
    if (a.size() == 0) {
        return 0.0;
    }
    return a.cwiseAbs().maxCoeff();
}

double hermitian_residual(const Matrix &a) {
    if (a.rows() != a.cols()) {
        return INFINITY;
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = i; j < a.cols(); j++) {
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
        }
    }
    return worst;
}

void require_hermitian(const Matrix &a, const char *field, double tolerance) {
    if (a.rows() != a.cols()) {
        std::ostringstream msg;
        msg << "expected a square matrix, got " << a.rows() << "x" << a.cols();
        throw InvalidArgument(field, msg.str());
    }
    if (a.rows() < 2) {
        throw InvalidArgument(field, "dimension must be at least 2");
    }
    double residual = hermitian_residual(a);
    if (!(residual <= tolerance)) {
        std::ostringstream msg;
        msg << "not Hermitian: max|A - A^dagger| = " << residual << " exceeds " << tolerance;
        throw InvalidArgument(field, msg.str());
    }
}

EigenDecomposition eig_hermitian(const Matrix &a) {
    require_hermitian(a, "eig_hermitian input");
    if (!a.allFinite()) {
        throw NumericalError("eig_hermitian: input contains non-finite entries");
    }
    // The solver reads only the lower triangle; symmetrize so tolerated
    // asymmetry is averaged rather than silently dropped.
    Matrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig_hermitian: eigensolver did not converge");
    }
    return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix expm_from_eig(const EigenDecomposition &eig, double dt) {
    Eigen::VectorXcd phases(eig.values.size());
    for (Eigen::Index m = 0; m < eig.values.size(); m++) {
        phases[m] = std::polar(1.0, -eig.values[m] * dt);
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Matrix expm_hermitian_generator(const Matrix &a, double dt) {
    if (!(dt > 0.0)) {
        throw InvalidArgument("dt", "time step must be positive");
    }
    return expm_from_eig(eig_hermitian(a), dt);
}

Complex frobenius_overlap(const Matrix &a, const Matrix &b, const Matrix &projector) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || b.cols() != projector.rows() ||
        projector.rows() != projector.cols()) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << a.rows() << "x" << a.cols() << ", " << b.rows() << "x"
            << b.cols() << ", projector " << projector.rows() << "x" << projector.cols();
        throw InvalidArgument("frobenius_overlap", msg.str());
    }
    return trace_of_product(a.adjoint(), b * projector);
}

Complex trace_of_product(const Matrix &a, const Matrix &b) {
    // Tr(AB) = sum_ij A_ij B_ji
    return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace subgrape
