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

// Test-only oracles, independent of the library's linear solvers.

#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/green.hpp"
#include "rwre/lattice.hpp"

namespace rwre::test {

// Occupation measure by explicit time stepping of the sub-probability mass:
// visits[y] = sum_t P(X_t = y, not yet exited), absorbed[b] likewise. This is
// enumeration, not a linear solve, so it cross-checks green_row.
struct BruteGreen {
    std::unordered_map<Point, double, PointHash> visits;
    std::unordered_map<Point, double, PointHash> absorbed;
};

inline BruteGreen brute_green(const EnvironmentView& env, const Domain& B, const Point& x,
                              double tol = 1e-15, std::int64_t max_steps = 1'000'000) {
    BruteGreen out;
    std::unordered_map<Point, double, PointHash> mass{{x, 1.0}};
    out.visits[x] = 1.0;
    const int dc = direction_count(B.dimension());
    for (std::int64_t t = 0; t < max_steps && !mass.empty(); ++t) {
        std::unordered_map<Point, double, PointHash> next;
        double alive = 0.0;
        for (const auto& [p, m] : mass) {
            const ProbVector& w = env.site(p);
            for (int e = 0; e < dc; ++e) {
                const Point q = step(p, e);
                const double dm = m * w.w[static_cast<std::size_t>(e)];
                if (B.interior_contains(q)) {
                    next[q] += dm;
                    alive += dm;
                } else {
                    out.absorbed[q] += dm;
                }
            }
        }
        for (const auto& [p, m] : next) out.visits[p] += m;
        mass = std::move(next);
        if (alive < tol) break;
    }
    return out;
}

// 1D nearest-neighbor chain oracles on the interval (-a, b) with absorbing
// endpoints -a and b, started from 0.
struct Chain1D {
    // exit through -a for right-probability p: tridiagonal (Thomas) solve
    static double exit_left(std::int64_t a, std::int64_t b, double p) {
        const std::int64_t n = a + b - 1;
        std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
        std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
        rhs[0] = 1.0 - p;
        std::vector<double> upper(static_cast<std::size_t>(n), -p);
        std::vector<double> lower(static_cast<std::size_t>(n), -(1.0 - p));
        for (std::int64_t i = 1; i < n; ++i) {
            const double m = lower[static_cast<std::size_t>(i)] / diag[static_cast<std::size_t>(i - 1)];
            diag[static_cast<std::size_t>(i)] -= m * upper[static_cast<std::size_t>(i - 1)];
            rhs[static_cast<std::size_t>(i)] -= m * rhs[static_cast<std::size_t>(i - 1)];
        }
        std::vector<double> h(static_cast<std::size_t>(n));
        h[static_cast<std::size_t>(n - 1)] =
            rhs[static_cast<std::size_t>(n - 1)] / diag[static_cast<std::size_t>(n - 1)];
        for (std::int64_t i = n - 2; i >= 0; --i)
            h[static_cast<std::size_t>(i)] =
                (rhs[static_cast<std::size_t>(i)] -
                 upper[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i + 1)]) /
                diag[static_cast<std::size_t>(i)];
        return h[static_cast<std::size_t>(a - 1)];
    }

    // expected absorption time for the lazy symmetric walk that moves with
    // probability `move` (a birth-death solve has the closed form a*b/move)
    static double expected_time(std::int64_t a, std::int64_t b, double move) {
        return static_cast<double>(a) * static_cast<double>(b) / move;
    }

    // expected visits to 0 for the symmetric walk: tridiagonal solve of the
    // adjoint system (I - P^T) g = delta_0
    static double green_at_origin(std::int64_t a, std::int64_t b) {
        const std::int64_t n = a + b - 1;
        std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (std::int64_t i = 0; i < n; ++i) {
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
            if (i > 0) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)] = -0.5;
            if (i + 1 < n) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + 1)] = -0.5;
        }
        std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
        rhs[static_cast<std::size_t>(a - 1)] = 1.0;
        // forward elimination without pivoting (diagonally dominant)
        for (std::int64_t i = 1; i < n; ++i) {
            const double f = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)] /
                             m[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(i - 1)];
            for (std::int64_t j = 0; j < n; ++j)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    f * m[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(i - 1)];
        }
        std::vector<double> g(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t i = n - 1; i >= 0; --i) {
            double s = rhs[static_cast<std::size_t>(i)];
            for (std::int64_t j = i + 1; j < n; ++j)
                s -= m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
            g[static_cast<std::size_t>(i)] = s / m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        return g[static_cast<std::size_t>(a - 1)];
    }
};

}  // namespace rwre::test
