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

#include "rwre/green.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/ssrw_product.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

constexpr std::int64_t kDenseThreshold = 1024;

void check_elliptic(const ProbVector& w) {
    for (int e = 0; e < direction_count(w.d); ++e) {
        if (!(w.w[static_cast<std::size_t>(e)] > 0.0))
            throw config_error("kernel is not uniformly elliptic (zero weight)");
    }
}

struct Assembly {
    std::int64_t n = 0;
    // weights[i * 2d + e] = w(site_i, e); neighbor[i * 2d + e] = interior index
    // of site_i + e, or -1 when the step leaves the domain.
    std::vector<double> weights;
    std::vector<std::int32_t> neighbor;
};

Assembly assemble(const EnvironmentView& env, const Domain& B) {
    Assembly a;
    const auto interior = B.interior();
    const int dc = direction_count(B.dimension());
    a.n = static_cast<std::int64_t>(interior.size());
    a.weights.resize(static_cast<std::size_t>(a.n) * dc);
    a.neighbor.resize(static_cast<std::size_t>(a.n) * dc);
    for (std::int64_t i = 0; i < a.n; ++i) {
        const Point& p = interior[static_cast<std::size_t>(i)];
        const ProbVector& w = env.site(p);
        check_elliptic(w);
        for (int e = 0; e < dc; ++e) {
            a.weights[static_cast<std::size_t>(i) * dc + e] = w.w[static_cast<std::size_t>(e)];
            a.neighbor[static_cast<std::size_t>(i) * dc + e] = B.interior_index(step(p, e));
        }
    }
    return a;
}

// Solves (I - P^T) g = delta_x (adjoint == true) or (I - P) h = rhs.
std::vector<double> solve_linear(const Assembly& a, int dc, const std::vector<double>& rhs,
                                 bool adjoint, const SolveOptions& opts, std::string& method) {
    const std::int64_t n = a.n;
    if (n <= kDenseThreshold) {
        method = "dense_lu";
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (std::int64_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
            for (int e = 0; e < dc; ++e) {
                const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                if (j < 0) continue;
                const double w = a.weights[static_cast<std::size_t>(i) * dc + e];
                if (adjoint) m(j, i) -= w; else m(i, j) -= w;
            }
        }
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
        Eigen::VectorXd x = m.partialPivLu().solve(b);
        return std::vector<double>(x.data(), x.data() + n);
    }
    // Banded 2D systems factorize cheaply; for d >= 3 the fill-in makes the
    // monotone fixed point the better exact route.
    if (dc == 4 && n <= opts.direct_budget) {
        method = "sparse_lu";
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(n) * (dc + 1));
        for (std::int64_t i = 0; i < n; ++i) {
            trip.emplace_back(i, i, 1.0);
            for (int e = 0; e < dc; ++e) {
                const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                if (j < 0) continue;
                const double w = a.weights[static_cast<std::size_t>(i) * dc + e];
                if (adjoint) trip.emplace_back(j, i, -w); else trip.emplace_back(i, j, -w);
            }
        }
        Eigen::SparseMatrix<double> m(n, n);
        m.setFromTriplets(trip.begin(), trip.end());
        m.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(m);
        lu.factorize(m);
        if (lu.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed");
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
        Eigen::VectorXd x = lu.solve(b);
        return std::vector<double>(x.data(), x.data() + n);
    }
    if (n > opts.iter_budget)
        throw budget_error("system of " + std::to_string(n) + " sites exceeds the iteration budget " +
                           std::to_string(opts.iter_budget));

    // Fixed-point sweeps on the substochastic kernel; monotone from zero, so
    // the geometric increment ratio certifies the remaining error.
    method = "fixed_point";
    std::vector<double> g(rhs), next(static_cast<std::size_t>(n));
    double prev_delta = 0.0;
    for (int sweep = 0; sweep < 2'000'000; ++sweep) {
        next = rhs;
        if (adjoint) {
            for (std::int64_t i = 0; i < n; ++i) {
                const double gi = g[static_cast<std::size_t>(i)];
                if (gi == 0.0) continue;
                for (int e = 0; e < dc; ++e) {
                    const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                    if (j >= 0)
                        next[static_cast<std::size_t>(j)] += gi * a.weights[static_cast<std::size_t>(i) * dc + e];
                }
            }
        } else {
            for (std::int64_t i = 0; i < n; ++i) {
                double s = rhs[static_cast<std::size_t>(i)];
                for (int e = 0; e < dc; ++e) {
                    const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                    if (j >= 0)
                        s += a.weights[static_cast<std::size_t>(i) * dc + e] * g[static_cast<std::size_t>(j)];
                }
                next[static_cast<std::size_t>(i)] = s;
            }
        }
        double delta = 0.0, scale = 1.0;
        for (std::int64_t i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(next[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)]));
            scale = std::max(scale, std::abs(next[static_cast<std::size_t>(i)]));
        }
        g.swap(next);
        if (delta == 0.0) return g;
        if (prev_delta > 0.0 && delta < prev_delta) {
            const double rho = delta / prev_delta;
            if (delta * rho / (1.0 - rho) < opts.iter_tol * scale) return g;
        }
        prev_delta = delta;
    }
    throw budget_error("fixed-point solve did not converge");
}

std::vector<double> boundary_from_row(const Assembly& a, const Domain& B,
                                      const std::vector<double>& g_interior, const Point& x) {
    const int dc = direction_count(B.dimension());
    const auto interior = B.interior();
    std::vector<double> gb(B.boundary().size(), 0.0);
    (void)x;
    for (std::int64_t i = 0; i < a.n; ++i) {
        const double gi = g_interior[static_cast<std::size_t>(i)];
        for (int e = 0; e < dc; ++e) {
            if (a.neighbor[static_cast<std::size_t>(i) * dc + e] >= 0) continue;
            const Point q = step(interior[static_cast<std::size_t>(i)], e);
            const std::int32_t bi = B.boundary_index(q);
            if (bi >= 0)
                gb[static_cast<std::size_t>(bi)] += gi * a.weights[static_cast<std::size_t>(i) * dc + e];
        }
    }
    return gb;
}

}  // namespace

GreenRow green_row(const EnvironmentView& env, const Domain& B, const Point& x,
                   const SolveOptions& opts) {
    B.materialize(std::max(opts.direct_budget, opts.iter_budget));
    if (B.interior_index(x) < 0) throw config_error("green_row source must be an interior site");
    const Assembly a = assemble(env, B);
    const int dc = direction_count(B.dimension());
    std::vector<double> rhs(static_cast<std::size_t>(a.n), 0.0);
    rhs[static_cast<std::size_t>(B.interior_index(x))] = 1.0;

    GreenRow row;
    row.source = x;
    row.interior = solve_linear(a, dc, rhs, /*adjoint=*/true, opts, row.method);
    row.boundary = boundary_from_row(a, B, row.interior, x);
    KahanSum mass;
    for (double v : row.boundary) mass.add(v);
    row.boundary_mass = mass.value();
    return row;
}

double green_operator_apply(const GreenRow& row, const Domain& B,
                            const std::function<double(const Point&)>& f) {
    const auto interior = B.interior();
    KahanSum acc;
    for (std::size_t i = 0; i < interior.size(); ++i) acc.add(row.interior[i] * f(interior[i]));
    return acc.value();
}

double expected_exit_time(const GreenRow& row) {
    KahanSum acc;
    for (double v : row.interior) acc.add(v);
    return acc.value();
}

double green_drift_e1(const EnvironmentView& env, const GreenRow& row, const Domain& B) {
    const auto interior = B.interior();
    KahanSum acc;
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const ProbVector& w = env.site(interior[i]);
        acc.add(row.interior[i] * (w.w[0] - w.w[1]));
    }
    return acc.value();
}

double green_recursion_residual(const EnvironmentView& env, const Domain& B, const GreenRow& row) {
    const int dc = direction_count(B.dimension());
    double worst = 0.0;
    auto value_at = [&](const Point& p) -> double {
        const std::int32_t i = B.interior_index(p);
        if (i >= 0) return row.interior[static_cast<std::size_t>(i)];
        const std::int32_t b = B.boundary_index(p);
        return b >= 0 ? row.boundary[static_cast<std::size_t>(b)] : 0.0;
    };
    auto residual = [&](const Point& y, double g) {
        double rhs = (y == row.source) ? 1.0 : 0.0;
        for (int e = 0; e < dc; ++e) {
            const Point z = step(y, opposite_index(e));  // z = y - e
            if (B.interior_index(z) < 0) continue;
            rhs += value_at(z) * env.site(z).w[static_cast<std::size_t>(e)];
        }
        worst = std::max(worst, std::abs(g - rhs));
    };
    const auto interior = B.interior();
    for (std::size_t i = 0; i < interior.size(); ++i) residual(interior[i], row.interior[i]);
    const auto boundary = B.boundary();
    for (std::size_t b = 0; b < boundary.size(); ++b) residual(boundary[b], row.boundary[b]);
    return worst;
}

std::vector<double> absorption_solve(const EnvironmentView& env, const Domain& B,
                                     std::span<const double> boundary_values,
                                     const SolveOptions& opts) {
    B.materialize(std::max(opts.direct_budget, opts.iter_budget));
    if (boundary_values.size() != B.boundary().size())
        throw config_error("absorption_solve boundary values size mismatch");
    const Assembly a = assemble(env, B);
    const int dc = direction_count(B.dimension());
    const auto interior = B.interior();
    std::vector<double> rhs(static_cast<std::size_t>(a.n), 0.0);
    for (std::int64_t i = 0; i < a.n; ++i) {
        double s = 0.0;
        for (int e = 0; e < dc; ++e) {
            if (a.neighbor[static_cast<std::size_t>(i) * dc + e] >= 0) continue;
            const Point q = step(interior[static_cast<std::size_t>(i)], e);
            const std::int32_t bi = B.boundary_index(q);
            if (bi >= 0)
                s += a.weights[static_cast<std::size_t>(i) * dc + e] *
                     boundary_values[static_cast<std::size_t>(bi)];
        }
        rhs[static_cast<std::size_t>(i)] = s;
    }
    std::string method;
    return solve_linear(a, dc, rhs, /*adjoint=*/false, opts, method);
}

namespace {

// One factorization of (I - P) serves all three phat quantities: the frontal
// and lateral absorption probabilities (forward solves) and the Green row for
// the identity form (transpose solve).
struct PhatSolve {
    double direct = 0.0;
    double lateral = 0.0;
    double identity = 0.0;
};

PhatSolve phat_on_strip(const EnvironmentView& env, const Domain& strip, const Point& x,
                        std::int64_t L, const SolveOptions& opts) {
    const Assembly a = assemble(env, strip);
    const int dc = direction_count(strip.dimension());
    const std::int64_t n = a.n;
    const std::int64_t src = strip.interior_index(x);
    const auto interior = strip.interior();
    const auto sides = strip.boundary_sides();

    Eigen::VectorXd rhs_front = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rhs_lat = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta(src) = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (int e = 0; e < dc; ++e) {
            if (a.neighbor[static_cast<std::size_t>(i) * dc + e] >= 0) continue;
            const Point q = step(interior[static_cast<std::size_t>(i)], e);
            const std::int32_t bi = strip.boundary_index(q);
            if (bi < 0) continue;
            const double w = a.weights[static_cast<std::size_t>(i) * dc + e];
            if (sides[static_cast<std::size_t>(bi)] == Side::Frontal) rhs_front(i) += w;
            if (sides[static_cast<std::size_t>(bi)] == Side::Lateral) rhs_lat(i) += w;
        }
    }

    Eigen::VectorXd h_front, h_lat, g;
    if (n <= kDenseThreshold) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        for (std::int64_t i = 0; i < n; ++i)
            for (int e = 0; e < dc; ++e) {
                const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                if (j >= 0) m(i, j) -= a.weights[static_cast<std::size_t>(i) * dc + e];
            }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        h_front = lu.solve(rhs_front);
        h_lat = lu.solve(rhs_lat);
        g = lu.transpose().solve(delta);
    } else {
        if (n > opts.direct_budget)
            throw budget_error("phat strip exceeds the direct-solve budget");
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(n) * (dc + 1));
        for (std::int64_t i = 0; i < n; ++i) {
            trip.emplace_back(i, i, 1.0);
            for (int e = 0; e < dc; ++e) {
                const std::int32_t j = a.neighbor[static_cast<std::size_t>(i) * dc + e];
                if (j >= 0) trip.emplace_back(i, j, -a.weights[static_cast<std::size_t>(i) * dc + e]);
            }
        }
        Eigen::SparseMatrix<double> m(n, n);
        m.setFromTriplets(trip.begin(), trip.end());
        m.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(m);
        lu.factorize(m);
        if (lu.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed");
        h_front = lu.solve(rhs_front);
        h_lat = lu.solve(rhs_lat);
        g = lu.transpose().solve(delta);
    }

    PhatSolve out;
    out.direct = h_front(src);
    out.lateral = h_lat(src);
    KahanSum drift;
    for (std::int64_t i = 0; i < n; ++i) {
        const double we1 = a.weights[static_cast<std::size_t>(i) * dc + 0] -
                           a.weights[static_cast<std::size_t>(i) * dc + 1];
        drift.add(g(i) * we1);
    }
    out.identity = 0.5 + drift.value() / (2.0 * static_cast<double>(L));
    return out;
}

}  // namespace

PhatResult phat(const EnvironmentView& env, const Point& x, std::int64_t L, const PhatOptions& opts) {
    if (L < 1) throw config_error("phat requires L >= 1");
    const int d = env.d;
    PhatResult res;
    std::int64_t cap = opts.cap > 0 ? opts.cap : 6 * L;
    for (;;) {
        Domain strip = Domain::strip(d, L, x, cap);
        strip.materialize(std::max(opts.solve.direct_budget, opts.solve.iter_budget));
        const PhatSolve s = phat_on_strip(env, strip, x, L, opts.solve);
        res.lateral_mass = s.lateral;
        res.cap_used = cap;
        res.identity_form = s.identity;
        res.direct = s.direct;
        if (res.lateral_mass <= opts.leak_tol || (opts.cap > 0) || cap >= opts.max_cap) {
            res.flagged = res.lateral_mass > opts.leak_tol;
            return res;
        }
        cap = cap * 2;
    }
}

double green_power_sum(const Domain& U, double alpha, const PowerSumOptions& opts) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw config_error("power sum requires alpha in [0,1)");
    const double p = 2.0 / (2.0 - alpha);
    const int d = U.dimension();

    const bool slab_e1 =
        U.kind() == Domain::Kind::Slab && U.slab_axis() == 0 && U.slab_sign() > 0;
    if ((slab_e1 || U.kind() == Domain::Kind::Strip) && U.interior_size_bound() > kDenseThreshold) {
        const std::int64_t M = U.scale();
        const std::int64_t cap = U.cap_param();
        std::vector<ProductGreen::Interval> axes(static_cast<std::size_t>(d));
        axes[0] = slab_e1 ? ProductGreen::Interval{-M, M - 1} : ProductGreen::Interval{-(M - 1), M - 1};
        for (int j = 1; j < d; ++j) axes[static_cast<std::size_t>(j)] = {-cap, cap};
        ProductGreen pg(d, std::move(axes), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0),
                        opts.quad_rel_tol);
        return pg.power_sum(p);
    }

    UniformEnvironment uni(d);
    const GreenRow row = green_row(EnvironmentView::of(uni), U, U.center(), opts.solve);
    KahanSum acc;
    for (double g : row.interior)
        if (g > 0.0) acc.add(std::pow(g, p));
    return acc.value();
}

double ssrw_slab_exit_time(int d, std::int64_t L, std::int64_t cap) {
    std::vector<ProductGreen::Interval> axes(static_cast<std::size_t>(d));
    axes[0] = {-L, L - 1};
    for (int j = 1; j < d; ++j) axes[static_cast<std::size_t>(j)] = {-cap, cap};
    ProductGreen pg(d, std::move(axes), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
    return pg.occupation_total();
}

FullLatticeGreen ssrw_green_full(int d, const Point& y, std::int64_t R) {
    if (d < 3) throw config_error("full-lattice Green's function requires d >= 3 (recurrent otherwise)");
    if (R < 2) throw config_error("full-lattice Green's function requires R >= 2");
    for (int i = 0; i < d; ++i) {
        if (std::abs(y.c[static_cast<std::size_t>(i)]) >= R)
            throw config_error("evaluation point must lie well inside the truncation radius");
    }
    auto cube_value = [&](std::int64_t radius) {
        std::vector<ProductGreen::Interval> axes(static_cast<std::size_t>(d), {-radius, radius});
        ProductGreen pg(d, std::move(axes), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
        std::vector<std::int64_t> target(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) target[static_cast<std::size_t>(i)] = y.c[static_cast<std::size_t>(i)];
        return pg.value(target);
    };
    const double g1 = cube_value(R);
    const double g2 = cube_value(2 * R);
    FullLatticeGreen out;
    out.value = 2.0 * g2 - g1;  // truncation error is ~1/R
    out.error_estimate = std::abs(g2 - g1);
    out.radius = R;
    return out;
}

}  // namespace rwre
