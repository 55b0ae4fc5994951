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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

// Type-erased environment kernel for solver assembly (not a hot path).
struct EnvironmentView {
    int d = 0;
    const void* obj = nullptr;
    const ProbVector& (*fn)(const void*, const Point&) = nullptr;

    template <class Env>
    static EnvironmentView of(const Env& env) {
        EnvironmentView v;
        v.d = env.dimension();
        v.obj = &env;
        v.fn = [](const void* o, const Point& p) -> const ProbVector& {
            return static_cast<const Env*>(o)->site(p);
        };
        return v;
    }
    const ProbVector& site(const Point& p) const { return fn(obj, p); }
};

// SSRW kernel.
struct UniformEnvironment {
    int d = 0;
    ProbVector u;
    explicit UniformEnvironment(int dim) : d(dim), u(ProbVector::uniform(dim)) {}
    int dimension() const { return d; }
    const ProbVector& site(const Point&) const { return u; }
};

struct SolveOptions {
    std::int64_t direct_budget = 120'000;
    std::int64_t iter_budget = 1'500'000;
    double iter_tol = 1e-13;
};

// Single-source killed Green's function g_B(x, .): interior values are
// expected visit counts, boundary values absorption probabilities.
struct GreenRow {
    Point source;
    std::vector<double> interior;  // aligned with domain.interior()
    std::vector<double> boundary;  // aligned with domain.boundary()
    double boundary_mass = 0.0;
    std::string method;
};

// Solves g = delta_x + g P_B for the substochastic kernel restricted to B.
// Rejects non-elliptic kernels (a zero weight) before solving.
GreenRow green_row(const EnvironmentView& env, const Domain& B, const Point& x,
                   const SolveOptions& opts = {});

inline GreenRow ssrw_green_killed(const Domain& B, const Point& x, const SolveOptions& opts = {}) {
    UniformEnvironment u(B.dimension());
    return green_row(EnvironmentView::of(u), B, x, opts);
}

// G_B[f](x) = sum_{y in B} g_B(x,y) f(y).
double green_operator_apply(const GreenRow& row, const Domain& B,
                            const std::function<double(const Point&)>& f);

// Expected exit time E_{x,w}(T_B) = G_B[1](x).
double expected_exit_time(const GreenRow& row);

// G_B[d.e1](x), assembled without allocation.
double green_drift_e1(const EnvironmentView& env, const GreenRow& row, const Domain& B);

// Forward absorption solve: h(y) = sum_e w(y,e) h(y+e) with h given on the
// boundary. Independent route from green_row (adjoint system).
std::vector<double> absorption_solve(const EnvironmentView& env, const Domain& B,
                                     std::span<const double> boundary_values,
                                     const SolveOptions& opts = {});

// Max residual of the Green recursion
// g(y) = 1_x(y) + sum_{e: y-e in B} g(y-e) w(y-e,e) over y in B and its
// boundary; exact solves keep this at roundoff level.
double green_recursion_residual(const EnvironmentView& env, const Domain& B, const GreenRow& row);

struct PhatOptions {
    std::int64_t cap = 0;          // 0 = adapt until leakage <= leak_tol
    double leak_tol = 1e-12;
    std::int64_t max_cap = 1 << 14;
    SolveOptions solve;
};

// p-hat(x, w) = P_{x,w}(T_{x.e1+L} < T_{x.e1-L}), both by direct absorption
// solve and by the optional-stopping identity 1/2 + G[d.e1](x)/(2L); the two
// routes agree to ~leakage. The strip is materialized with a transverse cap;
// lateral leakage is measured exactly and flagged when above tolerance.
struct PhatResult {
    double direct = 0.0;
    double identity_form = 0.0;
    double lateral_mass = 0.0;
    std::int64_t cap_used = 0;
    bool flagged = false;
};

PhatResult phat(const EnvironmentView& env, const Point& x, std::int64_t L,
                const PhatOptions& opts = {});

struct PowerSumOptions {
    SolveOptions solve;
    double quad_rel_tol = 1e-9;  // quadrature target for the product path
};

// sum_{y in U} g_{0,U}(0,y)^{2/(2-alpha)} for the SSRW kernel. Slabs along e1
// (and strips) are evaluated by the exact product-eigenbasis route without
// materializing the row; other domains go through green_row.
double green_power_sum(const Domain& U, double alpha, const PowerSumOptions& opts = {});

// SSRW exit time E_0(T_U) for product domains via the same route.
double ssrw_slab_exit_time(int d, std::int64_t L, std::int64_t cap);

struct FullLatticeGreen {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t radius = 0;
};

// Full-lattice SSRW Green's function g(y, 0) for d >= 3, approximated by the
// killed walk on the centered cube of radius R with a Richardson-style error
// bar from R vs 2R. d = 2 is rejected (recurrent walk).
FullLatticeGreen ssrw_green_full(int d, const Point& y, std::int64_t R);

}  // namespace rwre
