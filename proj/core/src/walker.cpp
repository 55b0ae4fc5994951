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

#include "rwre/walker.hpp"

#include <variant>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

namespace {

template <class EnvT>
inline int sample_direction(const EnvT& env, const Point& p, RandomStream& rs) {
    const ProbVector& w = env.site(p);
    double u = rs.next_unit();
    const int dc = direction_count(w.d);
    for (int e = 0; e < dc; ++e) {
        u -= w.w[static_cast<std::size_t>(e)];
        if (u < 0.0) return e;
    }
    return dc - 1;
}

template <class EnvT>
TrajectoryOutcome walk_domain(const EnvT& env, const Domain& domain, const Point& start,
                              std::uint64_t stream_key, std::int64_t step_cap) {
    RandomStream rs(stream_key);
    Point p = start;
    TrajectoryOutcome out;
    for (std::int64_t n = 1; n <= step_cap; ++n) {
        p = step(p, sample_direction(env, p, rs));
        if (!domain.interior_contains(p)) {
            out.exit_point = p;
            out.exit_side = domain.classify_exit(p);
            out.exit_time = n;
            out.cap_hit = (out.exit_side == Side::Lateral && domain.lateral_is_cap());
            for (int i = 0; i < p.d; ++i)
                out.displacement[static_cast<std::size_t>(i)] =
                    p.c[static_cast<std::size_t>(i)] - start.c[static_cast<std::size_t>(i)];
            return out;
        }
    }
    out.exit_point = p;
    out.exit_side = Side::Other;
    out.exit_time = step_cap;
    out.cap_hit = true;
    for (int i = 0; i < p.d; ++i)
        out.displacement[static_cast<std::size_t>(i)] =
            p.c[static_cast<std::size_t>(i)] - start.c[static_cast<std::size_t>(i)];
    return out;
}

ExitDistribution summarize_exits(const std::vector<TrajectoryOutcome>& outs) {
    ExitDistribution dist;
    dist.n_walks = static_cast<std::int64_t>(outs.size());
    std::int64_t caps = 0;
    std::map<std::string, std::int64_t> counts;
    for (const auto& o : outs) {
        if (o.cap_hit) {
            ++caps;
        } else {
            ++counts[side_name(o.exit_side)];
        }
    }
    for (const auto& [name, k] : counts) {
        dist.counts[name] = k;
        dist.sides[name] = proportion_estimate(k, dist.n_walks);
    }
    dist.cap_fraction = proportion_estimate(caps, dist.n_walks);
    return dist;
}

}  // namespace

std::uint64_t walk_stream_key(const EnvironmentLaw& law, std::uint64_t salt, std::uint64_t stream_id) {
    return derive_key({law.master_seed(), 0x57414c4b53545231ULL, salt, stream_id});
}

TrajectoryOutcome run_until_exit(const WalkEnvironment& env, const Domain& domain, const Point& start,
                                 std::uint64_t stream_key, std::int64_t step_cap) {
    if (!domain.interior_contains(start)) throw config_error("walk start must be an interior site");
    if (step_cap < 1) throw config_error("step cap must be >= 1");
    return std::visit(
        [&](const auto& e) -> TrajectoryOutcome {
            if constexpr (std::is_pointer_v<std::decay_t<decltype(e)>>)
                return walk_domain(*e, domain, start, stream_key, step_cap);
            else
                return walk_domain(e, domain, start, stream_key, step_cap);
        },
        env);
}

ExitDistribution estimate_exit_distribution(const EnvironmentLaw& law, const Domain& domain,
                                            const Point& start, std::int64_t n_walks,
                                            std::uint64_t salt, std::int64_t step_cap, int threads) {
    if (n_walks < 1) throw config_error("n_walks must be >= 1");
    std::vector<TrajectoryOutcome> outs(static_cast<std::size_t>(n_walks));
    parallel_for(n_walks, threads, [&](std::int64_t w) {
        const SampledEnvironment env{&law, derive_key({law.master_seed(), 0x454e564952ULL, salt, static_cast<std::uint64_t>(w)})};
        outs[static_cast<std::size_t>(w)] =
            walk_domain(env, domain, start, walk_stream_key(law, salt, static_cast<std::uint64_t>(w)), step_cap);
    });
    return summarize_exits(outs);
}

ExitDistribution estimate_exit_distribution_quenched(const EnvironmentLaw& law, std::uint64_t env_id,
                                                     const Domain& domain, const Point& start,
                                                     std::int64_t n_walks, std::uint64_t salt,
                                                     std::int64_t step_cap, int threads) {
    if (n_walks < 1) throw config_error("n_walks must be >= 1");
    std::vector<TrajectoryOutcome> outs(static_cast<std::size_t>(n_walks));
    const SampledEnvironment env{&law, env_id};
    parallel_for(n_walks, threads, [&](std::int64_t w) {
        outs[static_cast<std::size_t>(w)] =
            walk_domain(env, domain, start, walk_stream_key(law, salt ^ 0xabcdULL, static_cast<std::uint64_t>(w)), step_cap);
    });
    return summarize_exits(outs);
}

MCEstimate estimate_velocity(const EnvironmentLaw& law, std::int64_t n_steps, std::int64_t n_walks,
                             std::uint64_t salt, int threads) {
    if (n_steps < 1) throw config_error("n_steps must be >= 1");
    if (n_walks < 1) throw config_error("n_walks must be >= 1");
    std::vector<double> samples(static_cast<std::size_t>(n_walks));
    parallel_for(n_walks, threads, [&](std::int64_t w) {
        const SampledEnvironment env{&law, derive_key({law.master_seed(), 0x454e564956ULL, salt, static_cast<std::uint64_t>(w)})};
        RandomStream rs(walk_stream_key(law, salt ^ 0x76ULL, static_cast<std::uint64_t>(w)));
        Point p = Point::zero(law.dimension());
        for (std::int64_t n = 0; n < n_steps; ++n) p = step(p, sample_direction(env, p, rs));
        samples[static_cast<std::size_t>(w)] = static_cast<double>(p.c[0]) / static_cast<double>(n_steps);
    });
    return mc_from_samples(samples);
}

std::vector<HittingRatio> estimate_hitting_ratios(const EnvironmentLaw& law,
                                                  const std::vector<std::int64_t>& levels,
                                                  std::int64_t n_walks, std::uint64_t salt,
                                                  std::int64_t step_cap, int threads) {
    if (levels.empty()) throw config_error("levels must be nonempty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1 || (i > 0 && levels[i] <= levels[i - 1]))
            throw config_error("levels must be positive and increasing");
    }
    const std::int64_t top = levels.back();
    // hit_time[w * levels.size() + k]; -1 when the cap intervened
    std::vector<std::int64_t> hits(static_cast<std::size_t>(n_walks) * levels.size(), -1);
    parallel_for(n_walks, threads, [&](std::int64_t w) {
        const SampledEnvironment env{&law, derive_key({law.master_seed(), 0x454e564948ULL, salt, static_cast<std::uint64_t>(w)})};
        RandomStream rs(walk_stream_key(law, salt ^ 0x48ULL, static_cast<std::uint64_t>(w)));
        Point p = Point::zero(law.dimension());
        std::size_t next_level = 0;
        for (std::int64_t n = 1; n <= step_cap && next_level < levels.size(); ++n) {
            p = step(p, sample_direction(env, p, rs));
            while (next_level < levels.size() && p.c[0] == levels[next_level]) {
                hits[static_cast<std::size_t>(w) * levels.size() + next_level] = n;
                ++next_level;
            }
            if (p.c[0] >= top && next_level >= levels.size()) break;
        }
    });

    std::vector<HittingRatio> out(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        out[k].level = levels[k];
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(n_walks));
        for (std::int64_t w = 0; w < n_walks; ++w) {
            const std::int64_t t = hits[static_cast<std::size_t>(w) * levels.size() + k];
            if (t < 0) {
                ++out[k].flagged;
            } else {
                samples.push_back(static_cast<double>(t) / static_cast<double>(levels[k]));
            }
        }
        out[k].ratio = mc_from_samples(samples);
    }
    return out;
}

}  // namespace rwre
