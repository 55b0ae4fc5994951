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
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

using namespace rwre;

TEST_CASE("slab classification and extent") {
    const Domain slab = Domain::slab(2, Direction{0, +1}, 2, Point::zero(2), 3);
    CHECK(slab.interior_contains(make_point({1, 0})));
    CHECK(!slab.interior_contains(make_point({2, 0})));
    CHECK(slab.classify_exit(make_point({2, 0})) == Side::Frontal);
    CHECK(slab.classify_exit(make_point({-3, 0})) == Side::Back);
    CHECK(slab.classify_exit(make_point({0, 4})) == Side::Lateral);
    CHECK(slab.lateral_is_cap());

    const Domain unit = Domain::slab(2, Direction{0, +1}, 1, Point::zero(2), 3);
    CHECK(unit.interior_contains(make_point({-1, 0})));
    CHECK(unit.interior_contains(make_point({0, 0})));
    CHECK(!unit.interior_contains(make_point({1, 0})));
    CHECK(!unit.interior_contains(make_point({-2, 0})));
}

TEST_CASE("slab site count matches window enumeration") {
    const Domain slab = Domain::slab(2, Direction{0, +1}, 2, Point::zero(2), 3);
    slab.materialize(1000);
    // independent enumeration of the window
    std::int64_t count = 0;
    for (std::int64_t t = -10; t <= 10; ++t)
        for (std::int64_t u = -10; u <= 10; ++u)
            if (t >= -2 && t < 2 && u >= -3 && u <= 3) ++count;
    CHECK(count == 28);
    CHECK(static_cast<std::int64_t>(slab.interior().size()) == 28);
}

TEST_CASE("slab rejects degenerate parameters") {
    CHECK_THROWS_AS(Domain::slab(2, Direction{0, +1}, 0, Point::zero(2), 3), config_error);
    CHECK_THROWS_AS(Domain::slab(2, Direction{0, +1}, 2, Point::zero(2), 0), config_error);
}

TEST_CASE("box sides per the defining inequalities") {
    const Domain box = Domain::box(2, 2, Point::zero(2));
    CHECK(box.classify_exit(make_point({2, 0})) == Side::Frontal);
    CHECK(box.classify_exit(make_point({0, 200})) == Side::Lateral);
    CHECK(box.classify_exit(make_point({-1, 0})) == Side::Back);
    CHECK(!box.interior_contains(make_point({-1, 0})));
    CHECK(box.interior_contains(make_point({0, 0})));
    CHECK(box.interior_contains(make_point({1, 199})));
}

TEST_CASE("box boundary is partitioned with frontal > back > lateral precedence") {
    Domain box = Domain::box(2, 4, Point::zero(2));
    box.materialize(100'000);
    const auto boundary = box.boundary();
    const auto sides = box.boundary_sides();
    REQUIRE(boundary.size() == sides.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        CHECK(!box.interior_contains(boundary[i]));
        CHECK(sides[i] != Side::Other);
        // frontal checked first
        if (boundary[i].c[0] >= 4) CHECK(sides[i] == Side::Frontal);
    }
    // every interior neighbor is interior or boundary
    for (const Point& p : box.interior()) {
        for (int e = 0; e < direction_count(2); ++e) {
            const Point q = step(p, e);
            CHECK((box.interior_contains(q) || box.boundary_index(q) >= 0));
        }
    }
    // interior and boundary disjoint
    for (const Point& p : box.interior()) CHECK(box.boundary_index(p) == -1);
}

TEST_CASE("middle-frontal part and its back side") {
    const MiddleFrontal mf = middle_frontal(2, 4, Point::zero(2));
    CHECK(mf.part.interior_contains(make_point({2, 0})));
    bool on_back = false;
    for (const Point& p : mf.back_side)
        if (p == make_point({2, 0})) on_back = true;
    CHECK(on_back);
    CHECK(!mf.part.interior_contains(make_point({2, 64})));
    CHECK(!mf.part.interior_contains(make_point({4, 0})));
    CHECK(middle_frontal_contains(2, 4, Point::zero(2), make_point({3, 63})));
    CHECK(!middle_frontal_contains(2, 4, Point::zero(2), make_point({1, 0})));

    CHECK_THROWS_AS(middle_frontal(2, 5, Point::zero(2)), config_error);
}

TEST_CASE("partition index uses floor division and the stated pitches") {
    const LevelGeometry g{5, 2};  // N' = 5, N = 2, transverse pitch 15
    CHECK(partition_index(g, make_point({7, 0})).z[0] == 1);
    CHECK(partition_index(g, make_point({7, 0})).z[1] == 0);
    CHECK(partition_index(g, make_point({-1, 0})).z[0] == -1);
    CHECK(partition_index(g, make_point({0, 15})).z[1] == 1);
    // derived: enumerate cell boundaries around u = 15
    CHECK(partition_index(g, make_point({0, 14})).z[1] == 0);
    CHECK(partition_index(g, make_point({0, -1})).z[1] == -1);
}

TEST_CASE("partition tiles a window exactly") {
    const LevelGeometry g{3, 2};
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> cells;
    std::int64_t total = 0;
    for (std::int64_t x = -20; x <= 20; ++x) {
        for (std::int64_t y = -20; y <= 20; ++y) {
            const CellIndex z = partition_index(g, make_point({x, y}));
            ++cells[{z.z[0], z.z[1]}];
            ++total;
        }
    }
    std::int64_t sum = 0;
    for (const auto& [key, count] : cells) sum += count;
    CHECK(sum == total);
}

TEST_CASE("the box anchored at a cell has that cell as its middle-frontal part") {
    const LevelGeometry g{4, 8};  // N' = 4, N = 8 (N' = N/2 as at level 0)
    RandomStream rs(7);
    for (int trial = 0; trial < 50; ++trial) {
        Point x = Point::zero(2);
        x.c[0] = static_cast<std::int64_t>((rs.next_unit() - 0.5) * 1000);
        x.c[1] = static_cast<std::int64_t>((rs.next_unit() - 0.5) * 100000);
        const CellIndex z = partition_index(g, x);
        const Point anchor = box_anchor_of_cell(g, z);
        // middle-frontal part of B_N(anchor) with N' pitch: e1 in [N-N', N)
        const std::int64_t t = x.c[0] - anchor.c[0];
        CHECK(t >= g.n - g.n_prime);
        CHECK(t < g.n);
        CHECK(std::abs(x.c[1] - anchor.c[1]) < g.n * g.n * g.n);
    }
}

TEST_CASE("oblique slab uses rounded inner products") {
    const double inv = 1.0 / std::sqrt(2.0);
    const Domain slab = Domain::oblique_slab(2, {inv, inv}, 2, Point::zero(2), 6);
    CHECK(slab.interior_contains(make_point({1, 1})));     // ip = sqrt(2) < 2
    CHECK(!slab.interior_contains(make_point({2, 2})));    // ip = 2 sqrt(2) >= 2
    CHECK(slab.classify_exit(make_point({2, 2})) == Side::Frontal);
    CHECK(slab.classify_exit(make_point({-2, -2})) == Side::Back);
    slab.materialize(10'000);
    CHECK(slab.interior().size() > 0);
}

TEST_CASE("explicit domains classify their boundary as other") {
    const Domain dom = Domain::explicit_sites(2, {make_point({0, 0})});
    CHECK(dom.materialized());
    CHECK(dom.boundary().size() == 4);
    CHECK(dom.classify_exit(make_point({1, 0})) == Side::Other);
}

TEST_CASE("box materialization respects the site budget") {
    CHECK_THROWS_AS(make_box(2, 64, Point::zero(2), std::optional<std::int64_t>{1000}), budget_error);
    const Domain big = make_box(2, 64, Point::zero(2));  // no budget: predicates only
    CHECK(big.interior_contains(make_point({10, 1000})));
}
