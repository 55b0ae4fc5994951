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

#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

namespace {

using namespace rwre;

void BM_PhiloxBlock(benchmark::State& state) {
    std::uint64_t ctr = 0;
    for (auto _ : state) {
        const auto out = philox4x32({static_cast<std::uint32_t>(ctr++), 0, 0, 0}, {12, 34});
        benchmark::DoNotOptimize(out[0]);
    }
}
BENCHMARK(BM_PhiloxBlock);

void BM_SiteSample(benchmark::State& state) {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.0, 7);
    Point p = Point::zero(2);
    std::int64_t i = 0;
    for (auto _ : state) {
        p.c[0] = i++;
        benchmark::DoNotOptimize(law.site_atom(0, p));
    }
}
BENCHMARK(BM_SiteSample);

// steps/second through the full quenched kernel
void BM_WalkSteps(benchmark::State& state) {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.0, 9);
    const std::int64_t n_steps = 100'000;
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const MCEstimate v = estimate_velocity(law, n_steps, 1, stream++);
        benchmark::DoNotOptimize(v.mean);
    }
    state.SetItemsProcessed(state.iterations() * n_steps);
}
BENCHMARK(BM_WalkSteps);

}  // namespace

BENCHMARK_MAIN();
