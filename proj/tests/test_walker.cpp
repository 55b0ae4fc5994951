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

#include <doctest.h>

#include <cmath>
#include <map>

#include "rwre/errors.hpp"
#include "rwre/green.hpp"
#include "rwre/walker.hpp"

using namespace rwre;

TEST_CASE("a single-site domain is left in one step") {
    const EnvironmentLaw law = EnvironmentLaw::ssrw(2, 5);
    const Domain dom = Domain::explicit_sites(2, {make_point({0, 0})});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const TrajectoryOutcome out =
            run_until_exit(WalkEnvironment{SampledEnvironment{&law, 0}}, dom, make_point({0, 0}),
                           walk_stream_key(law, 0, s));
        CHECK(out.exit_time == 1);
        CHECK(!out.cap_hit);
    }
}

TEST_CASE("identical streams reproduce identical trajectories") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.0, 5);
    const Domain slab = Domain::slab(2, Direction{0, +1}, 8, Point::zero(2), 64);
    const SampledEnvironment env{&law, 3};
    const TrajectoryOutcome a =
        run_until_exit(WalkEnvironment{env}, slab, Point::zero(2), walk_stream_key(law, 1, 9));
    const TrajectoryOutcome b =
        run_until_exit(WalkEnvironment{env}, slab, Point::zero(2), walk_stream_key(law, 1, 9));
    CHECK(a.exit_point == b.exit_point);
    CHECK(a.exit_time == b.exit_time);
    const TrajectoryOutcome c =
        run_until_exit(WalkEnvironment{env}, slab, Point::zero(2), walk_stream_key(law, 1, 10));
    CHECK((!(c.exit_point == a.exit_point) || c.exit_time != a.exit_time));
}

TEST_CASE("walk start must be interior") {
    const EnvironmentLaw law = EnvironmentLaw::ssrw(2, 5);
    const Domain slab = Domain::slab(2, Direction{0, +1}, 4, Point::zero(2), 16);
    CHECK_THROWS_AS(run_until_exit(WalkEnvironment{SampledEnvironment{&law, 0}}, slab,
                                   make_point({4, 0}), 1),
                    config_error);
}

TEST_CASE("SSRW slab right-exit matches the gambler value (L+1)/(2L+1)") {
    const std::int64_t L = 6;
    const EnvironmentLaw law = EnvironmentLaw::ssrw(2, 11);
    const Domain slab = Domain::slab(2, Direction{0, +1}, L, Point::zero(2), 200);
    const ExitDistribution dist = estimate_exit_distribution(law, slab, Point::zero(2), 20'000, 1);
    const double expect = static_cast<double>(L + 1) / static_cast<double>(2 * L + 1);
    const MCEstimate frontal = dist.sides.at("frontal");
    CHECK(std::abs(frontal.mean - expect) <= 3.0 * frontal.stderr_);
    CHECK(dist.cap_fraction.mean == 0.0);
}

TEST_CASE("side counts plus cap hits account for every walk") {
    const EnvironmentLaw law = EnvironmentLaw::ssrw(2, 13);
    const Domain slab = Domain::slab(2, Direction{0, +1}, 10, Point::zero(2), 6);
    const ExitDistribution dist = estimate_exit_distribution(law, slab, Point::zero(2), 5000, 2);
    std::int64_t total = 0;
    for (const auto& [name, count] : dist.counts) total += count;
    const std::int64_t caps =
        static_cast<std::int64_t>(std::llround(dist.cap_fraction.mean * static_cast<double>(dist.n_walks)));
    CHECK(total + caps == dist.n_walks);
    CHECK(dist.cap_fraction.mean > 0.0);  // narrow cap: lateral absorption is flagged
}

TEST_CASE("quenched MC exit law converges to the exact absorption solve") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.3, 0.05, 0.03, 21);
    Domain box = Domain::box(2, 4, Point::zero(2));
    box.materialize(100'000);
    const std::uint64_t env_id = 7;
    const SampledEnvironment env{&law, env_id};
    const GreenRow row = green_row(EnvironmentView::of(env), box, Point::zero(2));

    std::map<std::string, double> exact;
    const auto boundary = box.boundary();
    const auto sides = box.boundary_sides();
    for (std::size_t b = 0; b < boundary.size(); ++b) exact[side_name(sides[b])] += row.boundary[b];

    const ExitDistribution mc =
        estimate_exit_distribution_quenched(law, env_id, box, Point::zero(2), 100'000, 3);
    for (const auto& [name, est] : mc.sides) {
        REQUIRE(exact.count(name));
        CHECK(std::abs(est.mean - exact.at(name)) <= 3.0 * est.stderr_ + 1e-12);
    }
}

TEST_CASE("annealed equals quenched-averaged within joint intervals") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.02, 29);
    Domain box = Domain::box(2, 2, Point::zero(2));
    box.materialize(100'000);

    // average of exact quenched frontal-exit probabilities over 1e3 environments
    std::vector<double> frontal;
    for (std::uint64_t env_id = 0; env_id < 1000; ++env_id) {
        const SampledEnvironment env{&law, derive_key({law.master_seed(), 0x454e564952ULL, 4, env_id})};
        const GreenRow row = green_row(EnvironmentView::of(env), box, Point::zero(2));
        double f = 0.0;
        const auto sides = box.boundary_sides();
        for (std::size_t b = 0; b < sides.size(); ++b)
            if (sides[b] == Side::Frontal) f += row.boundary[b];
        frontal.push_back(f);
    }
    const MCEstimate averaged = mc_from_samples(frontal);

    const ExitDistribution annealed = estimate_exit_distribution(law, box, Point::zero(2), 50'000, 4);
    const MCEstimate mc = annealed.sides.at("frontal");
    const double joint = std::sqrt(averaged.stderr_ * averaged.stderr_ + mc.stderr_ * mc.stderr_);
    CHECK(std::abs(averaged.mean - mc.mean) <= 4.0 * joint);
}

TEST_CASE("a single walk yields a 0/1 estimate with finite stderr") {
    const EnvironmentLaw law = EnvironmentLaw::ssrw(2, 17);
    const Domain slab = Domain::slab(2, Direction{0, +1}, 4, Point::zero(2), 64);
    const ExitDistribution dist = estimate_exit_distribution(law, slab, Point::zero(2), 1, 9);
    for (const auto& [name, est] : dist.sides) {
        CHECK((est.mean == 0.0 || est.mean == 1.0));
        CHECK(std::isfinite(est.stderr_));
    }
}

TEST_CASE("strongly drifted law exits a long box frontally") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.8, 0.2, 0.0, 19);
    REQUIRE(law.support().size() == 1);
    Domain box = Domain::box(2, 8, Point::zero(2));
    const Point start = make_point({4, 0});  // middle-frontal back side
    const ExitDistribution mc = estimate_exit_distribution(law, box, start, 20'000, 5);
    CHECK(mc.sides.at("frontal").mean > 0.99);
    // exact absorption solve on the same box agrees
    const SampledEnvironment env{&law, 0};
    const GreenRow row = green_row(EnvironmentView::of(env), box, start);
    double frontal = 0.0;
    const auto sides = box.boundary_sides();
    for (std::size_t b = 0; b < sides.size(); ++b)
        if (sides[b] == Side::Frontal) frontal += row.boundary[b];
    CHECK(frontal > 0.99);
    CHECK(std::abs(mc.sides.at("frontal").mean - frontal) <= 3.0 * mc.sides.at("frontal").stderr_ + 1e-9);
}

TEST_CASE("velocity: symmetric walk drifts nowhere, homogeneous walk at lambda") {
    const EnvironmentLaw ssrw = EnvironmentLaw::ssrw(2, 31);
    const MCEstimate v0 = estimate_velocity(ssrw, 1000, 2000, 0);
    CHECK(std::abs(v0.mean) <= 3.0 * v0.stderr_);

    const double eps = 0.4, lambda = 0.1;  // point-mass law: i.i.d. steps
    const EnvironmentLaw hom = EnvironmentLaw::two_point(2, eps, lambda, 0.0, 32);
    REQUIRE(hom.support().size() == 1);
    const MCEstimate v1 = estimate_velocity(hom, 1000, 2000, 0);
    CHECK(std::abs(v1.mean - lambda) <= 3.0 * v1.stderr_);
}

TEST_CASE("hitting ratios approach 1/velocity and flag capped walks") {
    // point-mass law: steps are i.i.d., so Wald gives E(T_n) = n/lambda exactly
    const double lambda = 0.1;
    const EnvironmentLaw hom = EnvironmentLaw::two_point(2, 0.4, lambda, 0.0, 37);
    REQUIRE(hom.support().size() == 1);
    const std::vector<std::int64_t> levels = {100, 1000};
    const auto ratios = estimate_hitting_ratios(hom, levels, 2000, 0, 10'000'000);
    REQUIRE(ratios.size() == 2);
    // Wald: E(T_n) = n / lambda for i.i.d. steps
    CHECK(std::abs(ratios[1].ratio.mean - 1.0 / lambda) <= 3.0 * ratios[1].ratio.stderr_);
    CHECK(ratios[1].flagged == 0);

    // velocity consistency within joint 4 sigma
    const MCEstimate v = estimate_velocity(hom, 2000, 2000, 1);
    const double inv_t = 1.0 / ratios[1].ratio.mean;
    const double dv = ratios[1].ratio.stderr_ * inv_t * inv_t;  // delta method
    CHECK(std::abs(v.mean - inv_t) <= 4.0 * std::sqrt(v.stderr_ * v.stderr_ + dv * dv));

    // null drift: the cap intervenes and is flagged, not dropped
    const EnvironmentLaw ssrw = EnvironmentLaw::ssrw(2, 41);
    const auto capped = estimate_hitting_ratios(ssrw, {200}, 50, 0, 2000);
    CHECK(capped[0].flagged > 0);
}
