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

#include <numbers>

#include <benchmark/benchmark.h>

#include "subgrape/transfer.hpp"

using namespace subgrape;

namespace {

TimeGrid grid(int n_sub) {
    TimeGrid g;
    g.pixels = 24;
    g.pixel_width = 1.0;
    g.n_sub = n_sub;
    return g;
}

void BM_BuildGaussian(benchmark::State &state) {
    auto g = grid(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_gaussian_filter(g, 2.0 * std::numbers::pi * 0.5));
    }
}
BENCHMARK(BM_BuildGaussian)->Arg(1)->Arg(10)->Arg(100);

// Algebraic w^-3 tail: exercises the oscillatory quadrature.
void BM_BuildButterworth(benchmark::State &state) {
    auto g = grid(static_cast<int>(state.range(0)));
    auto filter = FilterResponse::butterworth(2.0 * std::numbers::pi * 0.5, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_general_filter(g, filter));
    }
}
BENCHMARK(BM_BuildButterworth)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ApplyTranspose(benchmark::State &state) {
    auto g = grid(static_cast<int>(state.range(0)));
    auto t = build_cubic_spline(g);
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(g.pixels, -1.0, 1.0);
    Eigen::VectorXd s = t.apply(u);
    for (auto _ : state) {
        benchmark::DoNotOptimize(t.apply(u));
        benchmark::DoNotOptimize(t.apply_transpose(s));
    }
}
BENCHMARK(BM_ApplyTranspose)->Arg(10)->Arg(100);

}  // namespace
