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

#include "rwre/expansion.hpp"

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/green.hpp"
#include "rwre/walker.hpp"

namespace rwre {

double CovarianceMatrix::max_row_sum_abs() const {
    double worst = 0.0;
    for (int e = 0; e < 2 * d; ++e) {
        KahanSum row;
        for (int f = 0; f < 2 * d; ++f) row.add(at(e, f));
        worst = std::max(worst, std::abs(row.value()));
    }
    return worst;
}

double CovarianceMatrix::max_asymmetry() const {
    double worst = 0.0;
    for (int e = 0; e < 2 * d; ++e)
        for (int f = 0; f < e; ++f) worst = std::max(worst, std::abs(at(e, f) - at(f, e)));
    return worst;
}

CovarianceMatrix covariance_matrix(const EnvironmentLaw& law) {
    const int d = law.dimension();
    const int dc = direction_count(d);
    CovarianceMatrix C;
    C.d = d;
    C.c.assign(static_cast<std::size_t>(dc) * dc, 0.0);

    std::vector<double> mean(static_cast<std::size_t>(dc), 0.0);
    for (const SupportAtom& atom : law.support())
        for (int e = 0; e < dc; ++e) mean[static_cast<std::size_t>(e)] += atom.prob * atom.xi.xi[static_cast<std::size_t>(e)];
    for (int e = 0; e < dc; ++e) {
        for (int f = 0; f < dc; ++f) {
            KahanSum s;
            for (const SupportAtom& atom : law.support())
                s.add(atom.prob * (atom.xi.xi[static_cast<std::size_t>(e)] - mean[static_cast<std::size_t>(e)]) *
                      (atom.xi.xi[static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)]));
            C.c[static_cast<std::size_t>(e * dc + f)] = s.value();
        }
    }
    return C;
}

ExpansionTerms expansion_terms(const EnvironmentLaw& law, std::int64_t radius) {
    const int d = law.dimension();
    if (d < 3) throw config_error("expansion terms need d >= 3 (J undefined for d = 2)");
    const int dc = direction_count(d);

    ExpansionTerms t;
    t.radius = radius;
    t.d0.assign(static_cast<std::size_t>(d), 0.0);  // symmetric base kernel
    t.C = covariance_matrix(law);

    t.d1.assign(static_cast<std::size_t>(d), 0.0);
    for (const SupportAtom& atom : law.support()) {
        for (int a = 0; a < d; ++a)
            t.d1[static_cast<std::size_t>(a)] +=
                atom.prob * (atom.xi.xi[static_cast<std::size_t>(2 * a)] - atom.xi.xi[static_cast<std::size_t>(2 * a + 1)]);
    }

    t.J.assign(static_cast<std::size_t>(dc), 0.0);
    const FullLatticeGreen g0 = ssrw_green_full(d, Point::zero(d), radius);
    double jmin = 1e300, jmax = -1e300;
    t.j_error = 0.0;
    for (int e = 0; e < dc; ++e) {
        Point unit = Point::zero(d);
        const Direction dir = direction_from_index(e);
        unit.c[static_cast<std::size_t>(dir.axis)] = dir.sign;
        const FullLatticeGreen ge = ssrw_green_full(d, unit, radius);
        t.J[static_cast<std::size_t>(e)] = ge.value - g0.value;
        t.j_error = std::max(t.j_error, ge.error_estimate + g0.error_estimate);
        jmin = std::min(jmin, t.J[static_cast<std::size_t>(e)]);
        jmax = std::max(jmax, t.J[static_cast<std::size_t>(e)]);
    }
    t.j_anisotropy = jmax - jmin;

    t.d2.assign(static_cast<std::size_t>(d), 0.0);
    for (int e = 0; e < dc; ++e) {
        KahanSum cj;
        for (int f = 0; f < dc; ++f) cj.add(t.C.at(e, f) * t.J[static_cast<std::size_t>(f)]);
        const Direction dir = direction_from_index(e);
        t.d2[static_cast<std::size_t>(dir.axis)] += dir.sign * cj.value();
    }
    return t;
}

ExpansionVsSimulation expansion_vs_simulation(FamilyProfile profile, int d,
                                              const std::vector<double>& eps_grid,
                                              std::int64_t n_steps, std::int64_t n_walks,
                                              std::uint64_t master_seed, int threads) {
    if (eps_grid.empty()) throw config_error("epsilon grid must be nonempty");
    ExpansionVsSimulation out;
    out.family = profile == FamilyProfile::Qld ? "qld" : "homogeneous";
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double eps = eps_grid[i];
        if (!(eps > 0.0 && eps <= 0.4)) throw config_error("epsilon grid must lie in (0, 0.4]");
        double lambda = 0.0;
        switch (profile) {
            case FamilyProfile::Qld: lambda = eps * eps; break;
            case FamilyProfile::Homogeneous: lambda = eps / (2.0 * d); break;
        }
        const EnvironmentLaw law = EnvironmentLaw::two_point(
            d, eps, lambda, 0.0, derive_key({master_seed, 0x47524944ULL, i}));
        const ConditionReport cond = law.check_condition(DriftCondition::Quadratic);
        if (profile == FamilyProfile::Qld && !cond.holds)
            throw config_error("grid law fails its declared drift condition");
        const MCEstimate v = estimate_velocity(law, n_steps, n_walks, i, threads);
        VelocityGridRow row;
        row.eps = eps;
        row.lambda = lambda;
        row.v_hat = v.mean;
        row.stderr_ = v.stderr_;
        row.residual = v.mean - lambda;
        row.n_walks = n_walks;
        row.n_steps = n_steps;
        out.rows.push_back(row);
    }

    // fit log|residual| against log eps on points resolvable above noise
    std::vector<double> xs, ys;
    for (const auto& row : out.rows) {
        if (std::abs(row.residual) > 4.0 * row.stderr_ && row.residual != 0.0) {
            xs.push_back(std::log(row.eps));
            ys.push_back(std::log(std::abs(row.residual)));
        }
    }
    out.fit.used = static_cast<std::int64_t>(xs.size());
    if (xs.size() >= 2) {
        out.fit.censored = false;
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxx = 0, sxy = 0, ss = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        out.fit.exponent = sxy / sxx;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - my - out.fit.exponent * (xs[i] - mx);
            ss += r * r;
        }
        if (xs.size() > 2) out.fit.stderr_ = std::sqrt(ss / (static_cast<double>(xs.size() - 2) * sxx));
    }
    return out;
}

}  // namespace rwre
