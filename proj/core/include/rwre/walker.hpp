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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

inline constexpr std::int64_t kDefaultStepCap = 10'000'000;

struct TrajectoryOutcome {
    Point exit_point;
    Side exit_side = Side::Other;
    std::int64_t exit_time = 0;
    std::array<std::int64_t, kMaxDim> displacement{};
    // true when the walk was truncated by the step cap, or absorbed by an
    // artificial transverse cap; never silently folded into a real side
    bool cap_hit = false;
};

// Per-walk randomness derives from (master_seed, stream_id) so parallel walks
// reproduce regardless of scheduling.
std::uint64_t walk_stream_key(const EnvironmentLaw& law, std::uint64_t salt, std::uint64_t stream_id);

// One quenched trajectory from `start`, stopped at the first boundary hit or
// at step_cap.
TrajectoryOutcome run_until_exit(const WalkEnvironment& env, const Domain& domain, const Point& start,
                                 std::uint64_t stream_key, std::int64_t step_cap = kDefaultStepCap);

struct ExitDistribution {
    std::map<std::string, MCEstimate> sides;  // side name -> estimate
    std::map<std::string, std::int64_t> counts;
    MCEstimate cap_fraction;
    std::int64_t n_walks = 0;
};

// Annealed exit-law estimate: fresh environment per walk, Wilson-interval
// stderr. Side estimates plus the cap fraction sum to 1 exactly.
ExitDistribution estimate_exit_distribution(const EnvironmentLaw& law, const Domain& domain,
                                            const Point& start, std::int64_t n_walks,
                                            std::uint64_t salt = 0,
                                            std::int64_t step_cap = kDefaultStepCap, int threads = 1);

// Quenched variant: all walks run in the fixed environment (law, env_id).
ExitDistribution estimate_exit_distribution_quenched(const EnvironmentLaw& law, std::uint64_t env_id,
                                                     const Domain& domain, const Point& start,
                                                     std::int64_t n_walks, std::uint64_t salt = 0,
                                                     std::int64_t step_cap = kDefaultStepCap,
                                                     int threads = 1);

// Annealed velocity estimate: mean of X_n.e1/n over independent walks.
MCEstimate estimate_velocity(const EnvironmentLaw& law, std::int64_t n_steps, std::int64_t n_walks,
                             std::uint64_t salt = 0, int threads = 1);

struct HittingRatio {
    std::int64_t level = 0;       // n: first time X.e1 = n
    MCEstimate ratio;             // T_n / n over walks that reached the level
    std::int64_t flagged = 0;     // walks that hit the step cap first
};

// T_n/n for each n in levels (increasing); cap hits are flagged, not dropped
// silently into the mean.
std::vector<HittingRatio> estimate_hitting_ratios(const EnvironmentLaw& law,
                                                  const std::vector<std::int64_t>& levels,
                                                  std::int64_t n_walks, std::uint64_t salt = 0,
                                                  std::int64_t step_cap = kDefaultStepCap,
                                                  int threads = 1);

}  // namespace rwre
