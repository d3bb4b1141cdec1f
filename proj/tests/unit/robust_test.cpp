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


#include "subgrape/robust.hpp"

#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "../support/oracles.hpp"
#include "subgrape/error.hpp"
#include "subgrape/scenarios.hpp"

using namespace subgrape;

namespace {

Pulse random_pulse(const ControlProblem &p, uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Pulse pulse = Pulse::zeros(p);
    for (int k = 0; k < pulse.values.rows(); k++) {
        for (int j = p.padding; j < p.grid.pixels - p.padding; j++) {
            pulse.values(k, j) = dist(rng);
        }
    }
    return pulse;
}

ControlProblem small_example2() { return build_example2_nonrwa(Example2Params{.gate_time_ns = 1.0, .n_sub = 8}); }

}  // namespace

TEST(robust, uniform_ensemble_layout) {
    auto e = PhaseEnsemble::uniform(4, std::numbers::pi);
    ASSERT_EQ(e.size(), 4);
    EXPECT_DOUBLE_EQ(e.phases[1], std::numbers::pi / 4);
    EXPECT_DOUBLE_EQ(e.weights[3], 0.25);
    EXPECT_NO_THROW(e.validate());
    EXPECT_THROW(PhaseEnsemble::uniform(0, 1.0), InvalidArgument);

    PhaseEnsemble bad = e;
    bad.weights[0] = 0.5;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    bad = e;
    bad.phases[2] = 4.0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(robust, single_phase_equals_plain_fidelity) {
    auto p = small_example2();
    Pulse pulse = random_pulse(p, 1, 2.0);
    for (double psi : {0.0, 1.1}) {
        double plain = fidelity(p, propagate(p, pulse, psi));
        EXPECT_NEAR(robust_fidelity(p, pulse, PhaseEnsemble::single(psi, std::numbers::pi)), plain, 1e-15);
    }
}

TEST(robust, weighted_mean_of_phases) {
    auto p = small_example2();
    Pulse pulse = random_pulse(p, 2, 2.0);
    PhaseEnsemble e;
    e.period = std::numbers::pi;
    e.phases = {0.2, 1.4, 2.9};
    e.weights = {0.5, 0.3, 0.2};
    double expected = 0.0;
    for (int i = 0; i < 3; i++) {
        expected += e.weights[i] * fidelity(p, propagate(p, pulse, e.phases[i]));
    }
    Objective obj(p, e);
    EXPECT_NEAR(obj.fidelity(pulse), expected, 1e-14);
    auto per = obj.per_phase_fidelity(pulse);
    ASSERT_EQ(per.size(), 3u);
    EXPECT_NEAR(per[1], fidelity(p, propagate(p, pulse, 1.4)), 1e-15);
}

TEST(robust, phase_independent_problem_collapses) {
    auto p = build_example1_rwa();
    Objective obj(p, PhaseEnsemble::uniform(8, std::numbers::pi));
    EXPECT_TRUE(obj.collapsed());
    Pulse pulse = random_pulse(p, 3, 1.0);
    EXPECT_NEAR(obj.fidelity(pulse), fidelity(p, propagate(p, pulse, 0.0)), 1e-15);
    EXPECT_FALSE(Objective(small_example2(), PhaseEnsemble::uniform(2, std::numbers::pi)).collapsed());
}

TEST(robust, gradient_matches_finite_differences) {
    auto p = small_example2();
    Pulse pulse = random_pulse(p, 4, 2.0);
    Objective obj(p, PhaseEnsemble::uniform(3, std::numbers::pi));
    auto g = obj.gradient(pulse);
    auto fd = subgrape::testing::finite_difference_gradient([&](const Pulse &q) { return obj.fidelity(q); }, pulse);
    EXPECT_LT(subgrape::testing::relative_error(g.grad_u, fd), 1e-6);
    EXPECT_NEAR(g.fidelity, obj.fidelity(pulse), 1e-14);
}

TEST(robust, parallel_evaluation_is_identical) {
    auto p = small_example2();
    Pulse pulse = random_pulse(p, 5, 2.0);
    Objective serial(p, PhaseEnsemble::uniform(4, std::numbers::pi));
    Objective parallel(p, PhaseEnsemble::uniform(4, std::numbers::pi));
    parallel.set_parallel(true);
    EXPECT_EQ(serial.fidelity(pulse), parallel.fidelity(pulse));
    EXPECT_EQ(serial.gradient(pulse).grad_u, parallel.gradient(pulse).grad_u);
}
