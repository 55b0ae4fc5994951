/*
   Copyright 2026 the rwre-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "rwre/environment.hpp"
#include "rwre/green.hpp"
#include "rwre/ssrw_product.hpp"

namespace {

using namespace rwre;

void BM_GreenRowStrip2d(benchmark::State& state) {
    const std::int64_t L = state.range(0);
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.02, 1);
    const SampledEnvironment env{&law, 1};
    const Domain strip = Domain::strip(2, L, Point::zero(2), 8 * L);
    strip.materialize(2'000'000);
    for (auto _ : state) {
        const GreenRow row = green_row(EnvironmentView::of(env), strip, Point::zero(2));
        benchmark::DoNotOptimize(row.boundary_mass);
    }
    state.counters["sites"] = static_cast<double>(strip.interior().size());
}
BENCHMARK(BM_GreenRowStrip2d)->Arg(8)->Arg(16)->Arg(32);

void BM_Phat(benchmark::State& state) {
    const std::int64_t L = state.range(0);
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.0, 2);
    const SampledEnvironment env{&law, 1};
    for (auto _ : state) {
        const PhatResult r = phat(EnvironmentView::of(env), Point::zero(2), L);
        benchmark::DoNotOptimize(r.direct);
    }
}
BENCHMARK(BM_Phat)->Arg(6)->Arg(10);

void BM_PowerSumProduct(benchmark::State& state) {
    const std::int64_t L = state.range(0);
    const Domain slab = Domain::slab(3, Direction{0, +1}, L, Point::zero(3), 2 * L);
    for (auto _ : state) {
        benchmark::DoNotOptimize(green_power_sum(slab, 0.5));
    }
}
BENCHMARK(BM_PowerSumProduct)->Arg(8)->Arg(16)->Arg(32);

void BM_FullLatticeGreen(benchmark::State& state) {
    const std::int64_t R = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssrw_green_full(3, Point::zero(3), R).value);
    }
}
BENCHMARK(BM_FullLatticeGreen)->Arg(25)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
