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

#ifndef SUBGRAPE_MODEL_HPP
#define SUBGRAPE_MODEL_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subgrape/grid.hpp"
#include "subgrape/linalg.hpp"
#include "subgrape/transfer.hpp"

namespace subgrape {

/// A Hermitian generator H(t, psi). Units: rad/ns for the drift, and
/// dimensionless for controls (the control amplitude carries rad/ns).
struct GeneratorSampler {
    std::function<Matrix(double t, double psi)> sample;
    bool time_dependent = false;
    bool phase_dependent = false;

    static GeneratorSampler constant(Matrix m);

    Matrix operator()(double t, double psi) const { return sample(t, psi); }
};

/// Everything needed to evaluate and differentiate the gate fidelity.
///
/// The pulse window spans grid.pixels pixels. The first and last `padding`
/// pixels are held at zero so filtered fields can settle inside the window.
struct ControlProblem {
    GeneratorSampler drift;
    std::vector<GeneratorSampler> controls;
    /// Ideal gate. Only its columns inside the computational subspace matter.
    Matrix target;
    Matrix projector;
    int subspace_dim = 0;
    TimeGrid grid;
    /// One per control.
    std::vector<TransferSpec> transfers;
    int padding = 0;
    /// Period of the carrier phase psi, when anything depends on it.
    std::optional<double> phase_period;

    int dim() const { return static_cast<int>(target.rows()); }
    int num_controls() const { return static_cast<int>(controls.size()); }
    int free_pixels() const { return grid.pixels - 2 * padding; }
    bool phase_dependent() const;

    /// Largest padding demanded by any of the transfers.
    int required_padding() const;
};

/// Control amplitudes u[k][j] in rad/ns, one row per control. Padded
/// columns are part of the array and must stay zero.
struct Pulse {
    Eigen::MatrixXd values;
    int padding = 0;

    static Pulse zeros(const ControlProblem &problem);

    int controls() const { return static_cast<int>(values.rows()); }
    int pixels() const { return static_cast<int>(values.cols()); }
    int free_pixels() const { return pixels() - 2 * padding; }

    /// The unpadded block, controls x free_pixels.
    Eigen::MatrixXd free_values() const;
    /// Same free amplitudes embedded with a different zero margin.
    Pulse repadded(int new_padding) const;
    bool padding_is_zero() const;
};

/// H_{0,l} + sum_k s[k] H_{k,l} with every sampler read at the grid's
/// sample time for sub-pixel l.
Matrix sample_hamiltonian(const ControlProblem &problem, std::span<const double> s, int l,
                          double psi);

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ProblemDiagnostics {
    double hermitian_residual = 0.0;   // worst over all sampled generators
    double projector_residual = 0.0;   // max|P^2 - P|, max|P - P^dagger|
    double target_unitarity_residual = 0.0;
    double projector_trace = 0.0;
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    /// Throws InvalidArgument for the first issue, if any.
    void throw_if_invalid() const;
};

ProblemDiagnostics validate_problem(const ControlProblem &problem);

/// Throws InvalidArgument naming the pulse if its shape, finiteness or
/// padding does not fit the problem.
void check_pulse(const ControlProblem &problem, const Pulse &pulse);

}  // namespace subgrape

#endif
