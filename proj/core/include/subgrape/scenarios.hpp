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

#ifndef SUBGRAPE_SCENARIOS_HPP
#define SUBGRAPE_SCENARIOS_HPP

#include <array>

#include "subgrape/model.hpp"
#include "subgrape/robust.hpp"
#include "subgrape/transfer.hpp"

namespace subgrape {

// Benchmark problems. Frequencies are given cyclically (GHz) and turned
// into angular frequencies (rad/ns) when the problem is built.

/// Three-level anharmonic oscillator in the rotating frame with the
/// rotating-wave approximation; target is an X gate on {|0>, |1>}.
struct Example1Params {
    double delta_ghz = -0.5;
    double pixel_ns = 1.0;
    double gate_time_ns = 4.0;
    int n_sub = 1;
    TransferSpec transfer = TransferSpec::piecewise_constant();
    bool sample_at_left_edge = false;
};

/// Same oscillator and target, keeping the counter-rotating terms at
/// twice the carrier frequency and an unknown carrier phase psi.
struct Example2Params {
    double delta_ghz = -0.5;
    double omega1_ghz = 2.0;
    double pixel_ns = 0.125;
    double gate_time_ns = 2.0;
    int n_sub = 100;
    bool sample_at_left_edge = false;
};

/// Two detuned qubits with a rotating XX+YY coupling, driven by two tones;
/// target is sqrt(iSWAP).
struct Example3Params {
    double coupling_ghz = 0.094;
    double delta_ghz = 0.5;
    double gate_time_ns = 20.0;
    double pixel_ns = 1.0;
    int n_sub = 1;
    bool sample_at_left_edge = false;
};

/// Free pixel count for a gate time; throws unless gate_time is a positive
/// multiple of pixel_ns.
int pixels_for_gate_time(double gate_time_ns, double pixel_ns);

ControlProblem build_example1_rwa(const Example1Params &params = {});
ControlProblem build_example2_nonrwa(const Example2Params &params = {});
ControlProblem build_example3_multitone(const Example3Params &params = {});

/// Identity on |00>, |11>; (1, i; i, 1)/sqrt(2) on {|01>, |10>}.
Matrix target_sqrt_iswap();

/// Lowering operator |0><1| + sqrt(2)|1><2| of the three-level oscillator.
Matrix oscillator_lowering();

/// Held-out carrier phases used to judge phase robustness.
inline constexpr std::array<double, 9> kHeldOutPhases = {
    2.46245, 2.13875, 1.57081, 0.304685, 0.043838, 1.65238, 0.914728, 2.02047, 0.518253,
};

/// Default training ensemble: 8 equally spaced phases over the period.
PhaseEnsemble default_phase_ensemble(const ControlProblem &problem, int size = 8);

}  // namespace subgrape

#endif
