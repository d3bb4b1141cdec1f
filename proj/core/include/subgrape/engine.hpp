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

#ifndef SUBGRAPE_ENGINE_HPP
#define SUBGRAPE_ENGINE_HPP

#include <vector>

#include <Eigen/Dense>

#include "subgrape/linalg.hpp"
#include "subgrape/model.hpp"
#include "subgrape/transfer.hpp"

namespace subgrape {

/// Eigenvalue gaps with |lambda_m - lambda_n| * dt below this use the
/// coincident-eigenvalue form of the step derivative.
inline constexpr double kDegeneracyThreshold = 1e-9;

enum class DerivativeMode {
    /// Divided differences in the eigenbasis of the slice Hamiltonian.
    exact,
    /// dU_l/ds = -i dt H_k U_l, valid when ||H dt|| << 1.
    first_order,
};

struct EngineOptions {
    DerivativeMode derivative = DerivativeMode::exact;
    bool keep_field_gradient = false;
};

/// A problem frozen at one carrier phase: transfer matrices plus every
/// generator evaluated on the sub-pixel grid. Time-independent generators
/// are stored once.
class SampledProblem {
   public:
    SampledProblem(const ControlProblem &problem, double psi);

    const ControlProblem &problem() const { return problem_; }
    double psi() const { return psi_; }
    const std::vector<TransferMatrix> &transfers() const { return transfers_; }

    const Matrix &drift(int l) const { return drift_.size() == 1 ? drift_[0] : drift_[l]; }
    const Matrix &control(int k, int l) const {
        const auto &c = controls_[k];
        return c.size() == 1 ? c[0] : c[l];
    }

    /// Sub-pixel field samples s[k][l] for the pulse.
    Eigen::MatrixXd fields(const Pulse &pulse) const;

   private:
    ControlProblem problem_;
    double psi_;
    std::vector<TransferMatrix> transfers_;
    std::vector<Matrix> drift_;
    std::vector<std::vector<Matrix>> controls_;
};

/// Sub-pixel propagators and their partial products.
///   forward[l]  = U_{l-1} ... U_0      (forward[0] = I, forward[M] = U(T))
///   backward[l] = U_{M-1} ... U_{l+1}  (backward[M-1] = I)
struct PropagationRecord {
    double psi = 0.0;
    Eigen::MatrixXd fields;
    std::vector<EigenDecomposition> eigs;
    std::vector<Matrix> propagators;
    std::vector<Matrix> forward;
    std::vector<Matrix> backward;

    const Matrix &final_unitary() const { return forward.back(); }
    int slices() const { return static_cast<int>(propagators.size()); }
};

struct GradientResult {
    double fidelity = 0.0;
    /// dPhi/du[k][j], controls x pixels. Padded columns are zero.
    Eigen::MatrixXd grad_u;
    /// dPhi/ds[k][l], only filled when EngineOptions::keep_field_gradient.
    Eigen::MatrixXd grad_s;
};

/// Forward propagation. `with_backward` also fills the backward partials
/// needed by the gradient.
PropagationRecord propagate(const SampledProblem &sampled, const Pulse &pulse,
                            bool with_backward = true);
PropagationRecord propagate(const ControlProblem &problem, const Pulse &pulse, double psi);

/// |Tr(U_ideal^dagger U P_Q)|^2 / d_Q^2.
double fidelity(const ControlProblem &problem, const Matrix &final_unitary);
double fidelity(const ControlProblem &problem, const PropagationRecord &record);

/// dU/ds of U = exp(-i (H + s H_k) dt) at s = 0, where `eig` diagonalizes H.
Matrix exact_step_derivative(const EigenDecomposition &eig, const Matrix &control, double dt);

GradientResult gradient(const SampledProblem &sampled, const Pulse &pulse,
                        const EngineOptions &options = {});
GradientResult gradient(const ControlProblem &problem, const Pulse &pulse, double psi,
                        const EngineOptions &options = {});

/// Fidelity without building the gradient caches.
double evaluate(const SampledProblem &sampled, const Pulse &pulse);

/// Re-integrates the pulse with `refinement` times more sub-pixels per pixel
/// and returns the fidelity there.
double evaluate_on_fine_grid(const ControlProblem &problem, const Pulse &pulse, double psi,
                             int refinement);

}  // namespace subgrape

#endif
