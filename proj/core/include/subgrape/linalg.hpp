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

#ifndef SUBGRAPE_LINALG_HPP
#define SUBGRAPE_LINALG_HPP

#include <complex>

#include <Eigen/Dense>

namespace subgrape {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Absolute entrywise tolerance for treating a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

/// Spectral decomposition A = V diag(values) V^dagger of a Hermitian matrix.
/// Eigenvalues are ascending; the columns of `vectors` are orthonormal.
struct EigenDecomposition {
    RealVector values;
    Matrix vectors;

    Matrix reconstruct() const;
};

/// max_{ij} |A_ij|.
double max_abs(const Matrix &a);

/// max_{ij} |A_ij - conj(A_ji)|. Zero for exactly Hermitian input.
double hermitian_residual(const Matrix &a);

/// Throws InvalidArgument(field) if `a` is not square, smaller than 2x2, or
/// its Hermitian residual exceeds `tolerance`.
void require_hermitian(const Matrix &a, const char *field = "matrix",
                       double tolerance = kHermitianTolerance);

EigenDecomposition eig_hermitian(const Matrix &a);

/// exp(-i * diag(values) * dt) mapped back through the eigenvectors.
Matrix expm_from_eig(const EigenDecomposition &eig, double dt);

/// exp(-i A dt) for Hermitian A, computed in the eigenbasis of A.
Matrix expm_hermitian_generator(const Matrix &a, double dt);

/// Tr(A^dagger B P).
Complex frobenius_overlap(const Matrix &a, const Matrix &b, const Matrix &projector);

/// Tr(A B) without forming the product.
Complex trace_of_product(const Matrix &a, const Matrix &b);

}  // namespace subgrape

#endif
