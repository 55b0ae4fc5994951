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

#include "rwre/ballistic.hpp"
#include "rwre/errors.hpp"
#include "rwre/green.hpp"
#include "rwre/ssrw_product.hpp"
#include "support/oracles.hpp"

using namespace rwre;

namespace {

Domain small_box(int d, std::int64_t M) { return Domain::box(d, M, Point::zero(d)); }

}  // namespace

TEST_CASE("green row on a single site") {
    const Domain dom = Domain::explicit_sites(2, {make_point({0, 0})});
    const GreenRow row = ssrw_green_killed(dom, make_point({0, 0}));
    CHECK(row.interior[0] == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(row.boundary.size() == 4);
    for (double b : row.boundary) CHECK(b == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(row.boundary_mass == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("chain oracle: three-site interval has g(0,0) = 2") {
    CHECK(test::Chain1D::green_at_origin(2, 2) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("green row agrees with the brute-force occupation oracle") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.02, 11);
    for (std::uint64_t env_id = 0; env_id < 5; ++env_id) {
        const SampledEnvironment env{&law, env_id};
        const EnvironmentView view = EnvironmentView::of(env);
        Domain box = small_box(2, 4);
        const GreenRow row = green_row(view, box, Point::zero(2));
        const test::BruteGreen brute = test::brute_green(view, box, Point::zero(2));
        const auto interior = box.interior();
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const auto it = brute.visits.find(interior[i]);
            const double expect = it == brute.visits.end() ? 0.0 : it->second;
            CHECK(row.interior[i] == doctest::Approx(expect).epsilon(1e-10));
        }
        const auto boundary = box.boundary();
        for (std::size_t b = 0; b < boundary.size(); ++b) {
            const auto it = brute.absorbed.find(boundary[b]);
            const double expect = it == brute.absorbed.end() ? 0.0 : it->second;
            CHECK(row.boundary[b] == doctest::Approx(expect).epsilon(1e-10));
        }
        CHECK(std::abs(row.boundary_mass - 1.0) < 1e-12);
        CHECK(green_recursion_residual(view, box, row) < 1e-12);
    }
}

TEST_CASE("non-elliptic kernels are rejected before solving") {
    TableEnvironment env(2);
    ProbVector v = ProbVector::uniform(2);
    v.w[0] = 0.0;
    v.w[1] = 0.5;
    env.set(make_point({0, 0}), v);
    const Domain dom = Domain::explicit_sites(2, {make_point({0, 0})});
    CHECK_THROWS_AS(green_row(EnvironmentView::of(env), dom, make_point({0, 0})), config_error);
}

TEST_CASE("operator apply: f == 1 gives the exit time, f == 0 gives zero") {
    const Domain box = small_box(2, 4);
    const GreenRow row = ssrw_green_killed(box, Point::zero(2));
    const double et = green_operator_apply(row, box, [](const Point&) { return 1.0; });
    CHECK(et == doctest::Approx(expected_exit_time(row)).epsilon(1e-14));
    CHECK(green_operator_apply(row, box, [](const Point&) { return 0.0; }) == 0.0);
}

TEST_CASE("optional stopping: boundary mean displacement equals G[d.e1]") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.3, 0.05, 0.03, 23);
    for (std::uint64_t env_id = 0; env_id < 5; ++env_id) {
        const SampledEnvironment env{&law, env_id};
        const EnvironmentView view = EnvironmentView::of(env);
        Domain box = small_box(2, 4);
        box.materialize(100'000);
        // independent forward solve of u(y) = E_y(X_T . e1)
        std::vector<double> bv(box.boundary().size());
        for (std::size_t b = 0; b < bv.size(); ++b) bv[b] = static_cast<double>(box.boundary()[b].c[0]);
        const std::vector<double> u = absorption_solve(view, box, bv);
        const GreenRow row = green_row(view, box, Point::zero(2));
        const double via_green = green_drift_e1(view, row, box);
        const double via_stopping = u[static_cast<std::size_t>(box.interior_index(Point::zero(2)))];
        CHECK(std::abs(via_stopping - via_green) < 1e-9);
    }
}

TEST_CASE("phat: symmetric kernel gives exactly one half") {
    UniformEnvironment uni(2);
    const PhatResult r = phat(EnvironmentView::of(uni), Point::zero(2), 6);
    CHECK(r.direct == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.identity_form == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.lateral_mass <= 1e-12);
    CHECK(!r.flagged);
}

TEST_CASE("phat: homogeneous bias matches the projected gambler closed form") {
    // point-mass law with axial tilt: conditional right-jump p = 1/2 + d*beta
    const double eps = 0.4, beta = eps / 8.0;  // lambda = 2 beta = 0.1
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, eps, 2.0 * beta, 0.0, 3);
    REQUIRE(law.support().size() == 1);
    const SampledEnvironment env{&law, 0};
    const std::int64_t L = 8;
    const PhatResult r = phat(EnvironmentView::of(env), Point::zero(2), L);
    const double p_cond = 0.5 + 2.0 * beta;
    const double expect = 1.0 - gambler_exit_left(L, L, p_cond);
    CHECK(r.direct == doctest::Approx(expect).epsilon(1e-9));
    CHECK(std::abs(r.direct - r.identity_form) < 1e-9);
}

TEST_CASE("phat identity holds to 1e-9 on random environments") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.04, 0.02, 31);
    for (std::uint64_t env_id = 0; env_id < 10; ++env_id) {
        const SampledEnvironment env{&law, env_id};
        const PhatResult r = phat(EnvironmentView::of(env), make_point({3, -2}), 10);
        CHECK(std::abs(r.direct - r.identity_form) < 1e-9);
        CHECK(!r.flagged);
    }
}

TEST_CASE("killed SSRW row is symmetric under transverse flips") {
    const Domain slab = Domain::slab(2, Direction{0, +1}, 4, Point::zero(2), 8);
    const GreenRow row = ssrw_green_killed(slab, Point::zero(2));
    for (std::int64_t t = -4; t < 4; ++t) {
        for (std::int64_t u = 1; u <= 8; ++u) {
            const auto i1 = slab.interior_index(make_point({t, u}));
            const auto i2 = slab.interior_index(make_point({t, -u}));
            REQUIRE(i1 >= 0);
            REQUIRE(i2 >= 0);
            CHECK(row.interior[static_cast<std::size_t>(i1)] ==
                  doctest::Approx(row.interior[static_cast<std::size_t>(i2)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("slab exit time matches the lazy projected birth-death value") {
    // E_0(T_{U_L}) = d L (L+1); caps cost an exponentially small deficit, so
    // 25 L leaves only quadrature-level error
    const double et = ssrw_slab_exit_time(2, 8, 200);
    CHECK(et == doctest::Approx(test::Chain1D::expected_time(9, 8, 0.5)).epsilon(1e-9));
    CHECK(et == doctest::Approx(2.0 * 8.0 * 9.0).epsilon(1e-9));
    const double et3 = ssrw_slab_exit_time(3, 4, 120);
    CHECK(et3 == doctest::Approx(3.0 * 4.0 * 5.0).epsilon(1e-9));
}

TEST_CASE("product-eigenbasis Green values match the direct solve") {
    // d=3 slab, small enough for the dense path
    const std::int64_t L = 3, cap = 6;
    ProductGreen pg(3, {{-L, L - 1}, {-cap, cap}, {-cap, cap}}, {0, 0, 0});
    Domain slab = Domain::slab(3, Direction{0, +1}, L, Point::zero(3), cap);
    const GreenRow row = ssrw_green_killed(slab, Point::zero(3));
    const auto interior = slab.interior();
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const std::int64_t y[3] = {interior[i].c[0], interior[i].c[1], interior[i].c[2]};
        const double v = pg.value(std::span<const std::int64_t>(y, 3));
        CHECK(v == doctest::Approx(row.interior[i]).epsilon(1e-9));
    }
    CHECK(pg.occupation_total() == doctest::Approx(expected_exit_time(row)).epsilon(1e-9));

    // streamed power sum against the explicit row
    for (double alpha : {0.0, 0.5}) {
        const double p = 2.0 / (2.0 - alpha);
        double direct = 0.0;
        for (double g : row.interior) direct += std::pow(g, p);
        CHECK(pg.power_sum(p) == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("orbit multiplicities are right for three identical transverse axes") {
    // d=4 slab small enough for the dense route; exercises repeated-value
    // multisets and sign flips in the streamed enumeration
    const std::int64_t L = 2, cap = 3;
    ProductGreen pg(4, {{-L, L - 1}, {-cap, cap}, {-cap, cap}, {-cap, cap}}, {0, 0, 0, 0});
    Domain slab = Domain::slab(4, Direction{0, +1}, L, Point::zero(4), cap);
    const GreenRow row = ssrw_green_killed(slab, Point::zero(4));
    for (double alpha : {0.0, 0.8}) {
        const double p = 2.0 / (2.0 - alpha);
        double direct = 0.0;
        for (double g : row.interior) direct += std::pow(g, p);
        CHECK(pg.power_sum(p) == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("green_power_sum dispatches both routes consistently") {
    const Domain slab_small = Domain::slab(2, Direction{0, +1}, 4, Point::zero(2), 8);
    const double via_direct = green_power_sum(slab_small, 0.5);
    ProductGreen pg(2, {{-4, 3}, {-8, 8}}, {0, 0});
    CHECK(via_direct == doctest::Approx(pg.power_sum(2.0 / 1.5)).epsilon(1e-8));
    CHECK(green_power_sum(slab_small, 0.0) > 0.0);
    CHECK_THROWS_AS(green_power_sum(slab_small, 1.0), config_error);
}

TEST_CASE("fixed-point solver agrees with the factorization") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.03, 0.0, 17);
    const SampledEnvironment env{&law, 2};
    const EnvironmentView view = EnvironmentView::of(env);
    Domain strip = Domain::strip(2, 6, Point::zero(2), 120);  // 11 x 241 > dense threshold
    const GreenRow direct = green_row(view, strip, Point::zero(2));
    SolveOptions opts;
    opts.direct_budget = 10;  // force the fixed point
    const GreenRow iter = green_row(view, strip, Point::zero(2), opts);
    CHECK(iter.method == "fixed_point");
    for (std::size_t i = 0; i < direct.interior.size(); ++i)
        CHECK(iter.interior[i] == doctest::Approx(direct.interior[i]).epsilon(1e-10));
}

TEST_CASE("full-lattice Green: transient values, exact isotropy, J = -1") {
    const FullLatticeGreen g0 = ssrw_green_full(3, Point::zero(3), 20);
    CHECK(g0.value > 1.0);

    double j_first = 0.0;
    for (int e = 0; e < 6; ++e) {
        Point unit = Point::zero(3);
        const Direction dir = direction_from_index(e);
        unit.c[static_cast<std::size_t>(dir.axis)] = dir.sign;
        const FullLatticeGreen ge = ssrw_green_full(3, unit, 20);
        const double j = ge.value - g0.value;
        if (e == 0) j_first = j;
        CHECK(std::abs(j - j_first) < 1e-10);  // isotropy is exact by symmetry
        CHECK(j < 0.0);
    }
    // first-step identity forces J = -1 exactly (up to quadrature error)
    CHECK(j_first == doctest::Approx(-1.0).epsilon(1e-6));

    CHECK_THROWS_AS(ssrw_green_full(2, Point::zero(2), 20), config_error);
}

TEST_CASE("exit-time scaling stays within 5% of its mean over L in {8,16,32}") {
    std::vector<double> ratios;
    for (std::int64_t L : {8, 16, 32}) {
        const double et = ssrw_slab_exit_time(2, L, 6 * L);
        ratios.push_back(et / static_cast<double>(L * L));
    }
    const double mean = (ratios[0] + ratios[1] + ratios[2]) / 3.0;
    for (double r : ratios) CHECK(std::abs(r - mean) / mean < 0.05);
}
