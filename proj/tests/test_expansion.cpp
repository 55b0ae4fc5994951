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

#include "rwre/errors.hpp"
#include "rwre/expansion.hpp"

using namespace rwre;

TEST_CASE("covariance of a point-mass law vanishes") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.4, 0.1, 0.0, 3);
    REQUIRE(law.support().size() == 1);
    const CovarianceMatrix C = covariance_matrix(law);
    for (double c : C.c) CHECK(c == 0.0);
}

TEST_CASE("covariance rows sum to zero and the matrix is symmetric") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(3, 0.2, 0.02, 0.015, 5);
    const CovarianceMatrix C = covariance_matrix(law);
    CHECK(C.max_row_sum_abs() < 1e-14);
    CHECK(C.max_asymmetry() < 1e-14);
}

TEST_CASE("two-outcome covariance: C(e1,e1) = 4 a^2 q (1-q)") {
    // fair axial flip of size a = 1/8
    Perturbation up, down;
    up.d = down.d = 2;
    up.xi[0] = 1.0 / 8.0;
    up.xi[1] = -1.0 / 8.0;
    down.xi[0] = -1.0 / 8.0;
    down.xi[1] = 1.0 / 8.0;
    const EnvironmentLaw law =
        EnvironmentLaw::from_support(2, 0.2, {SupportAtom{up, 0.5}, SupportAtom{down, 0.5}}, 7);
    const CovarianceMatrix C = covariance_matrix(law);
    CHECK(C.at(0, 0) == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
    CHECK(C.at(0, 1) == doctest::Approx(-1.0 / 64.0).epsilon(1e-14));
}

TEST_CASE("expansion terms: d2 vanishes numerically, eps d1.e1 = lambda") {
    const double eps = 0.2, lambda = 0.02;
    const EnvironmentLaw law = EnvironmentLaw::two_point(3, eps, lambda, 0.01, 11);
    const ExpansionTerms t = expansion_terms(law, 25);
    for (double v : t.d0) CHECK(v == 0.0);
    CHECK(eps * t.d1[0] == doctest::Approx(lambda).epsilon(1e-13));
    for (double v : t.d2) CHECK(std::abs(v) < 1e-6);
    CHECK(t.j_anisotropy < 1e-10);
    CHECK(t.J[0] < 0.0);

    // point-mass perturbation: C = 0 forces d2 = 0 identically
    const EnvironmentLaw pm = EnvironmentLaw::two_point(3, 0.3, 0.05, 0.0, 13);
    REQUIRE(pm.support().size() == 1);
    const ExpansionTerms tp = expansion_terms(pm, 8);
    for (double v : tp.d2) CHECK(v == 0.0);
}

TEST_CASE("expansion terms reject d = 2") {
    const EnvironmentLaw law = EnvironmentLaw::two_point(2, 0.2, 0.02, 0.0, 17);
    CHECK_THROWS_AS(expansion_terms(law, 10), config_error);
}

TEST_CASE("homogeneous velocity grid is censored: residuals are pure noise") {
    const ExpansionVsSimulation sim = expansion_vs_simulation(
        FamilyProfile::Homogeneous, 2, {0.1, 0.2, 0.3}, 2000, 1500, 19);
    for (const auto& row : sim.rows) {
        CHECK(std::abs(row.residual) <= 4.0 * row.stderr_);
        // drift ceiling sanity
        CHECK(std::abs(row.v_hat) <= row.eps / 4.0 + 3.0 * row.stderr_);
    }
    CHECK(sim.fit.censored);
}

TEST_CASE("quadratic-drift grid keeps residuals inside eps^2/d plus noise") {
    const ExpansionVsSimulation sim =
        expansion_vs_simulation(FamilyProfile::Qld, 2, {0.1, 0.2}, 4000, 2500, 23);
    for (const auto& row : sim.rows) {
        CHECK(std::abs(row.residual) <= row.eps * row.eps / 2.0 + 3.0 * row.stderr_);
        CHECK(std::abs(row.v_hat) <= row.eps / 4.0 + 3.0 * row.stderr_);
    }
}

TEST_CASE("epsilon grid is validated") {
    CHECK_THROWS_AS(
        expansion_vs_simulation(FamilyProfile::Qld, 2, {0.5}, 100, 100, 1), config_error);
    CHECK_THROWS_AS(expansion_vs_simulation(FamilyProfile::Qld, 2, {}, 100, 100, 1), config_error);
}
