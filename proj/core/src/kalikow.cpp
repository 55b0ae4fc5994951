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

#include "rwre/kalikow.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <queue>

#include "rwre/errors.hpp"
#include "rwre/green.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

void require_connected(const Domain& B) {
    const auto sites = B.interior();
    if (sites.empty()) throw config_error("Kalikow domain must be nonempty");
    std::vector<char> seen(sites.size(), 0);
    std::queue<std::int32_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t visited = 1;
    const int dc = direction_count(B.dimension());
    while (!q.empty()) {
        const std::int32_t i = q.front();
        q.pop();
        for (int e = 0; e < dc; ++e) {
            const std::int32_t j = B.interior_index(step(sites[static_cast<std::size_t>(i)], e));
            if (j >= 0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                q.push(j);
                ++visited;
            }
        }
    }
    if (visited != sites.size()) throw config_error("Kalikow domain must be connected");
}

// Reusable dense kernel for one domain: the adjacency is fixed, only the
// per-site weights change across configurations.
struct DenseKernel {
    const Domain* B;
    int dc;
    std::int64_t n;
    std::vector<std::int32_t> neighbor;       // [i * dc + e] interior index or -1
    std::vector<std::int32_t> boundary_link;  // [i * dc + e] boundary index or -1
    Eigen::MatrixXd m;
    Eigen::VectorXd rhs;

    explicit DenseKernel(const Domain& dom) : B(&dom), dc(direction_count(dom.dimension())) {
        const auto sites = dom.interior();
        n = static_cast<std::int64_t>(sites.size());
        neighbor.resize(static_cast<std::size_t>(n) * dc);
        boundary_link.resize(static_cast<std::size_t>(n) * dc);
        for (std::int64_t i = 0; i < n; ++i) {
            for (int e = 0; e < dc; ++e) {
                const Point q = step(sites[static_cast<std::size_t>(i)], e);
                neighbor[static_cast<std::size_t>(i) * dc + e] = dom.interior_index(q);
                boundary_link[static_cast<std::size_t>(i) * dc + e] = dom.boundary_index(q);
            }
        }
        m.resize(n, n);
        rhs.resize(n);
    }

    // weights(i, e) -> double
    template <class W>
    void factor_adjoint(const W& weights) {
        m.setZero();
        for (std::int64_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
            for (int e = 0; e < dc; ++e) {
                const std::int32_t j = neighbor[static_cast<std::size_t>(i) * dc + e];
                if (j >= 0) m(j, i) -= weights(i, e);
            }
        }
        lu_.compute(m);
    }

    // g_B(x, .) for the current weights; boundary filled alongside.
    template <class W>
    void green(const W& weights, std::int64_t source_idx, std::vector<double>& g_int,
               std::vector<double>& g_bnd) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(source_idx) = 1.0;
        Eigen::VectorXd x = lu_.solve(b);
        g_int.assign(x.data(), x.data() + n);
        g_bnd.assign(B->boundary().size(), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            for (int e = 0; e < dc; ++e) {
                const std::int32_t bi = boundary_link[static_cast<std::size_t>(i) * dc + e];
                if (bi >= 0)
                    g_bnd[static_cast<std::size_t>(bi)] += g_int[static_cast<std::size_t>(i)] * weights(i, e);
            }
        }
    }

  private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Annealed expectations E(g_B(x,y)) and E(g_B(x,y) w(y,e)) accumulated over
// the configuration space (exact odometer or Monte Carlo samples).
struct AnnealedGreen {
    std::vector<KahanSum> eg_int;
    std::vector<KahanSum> eg_bnd;
    std::vector<std::array<KahanSum, 2 * kMaxDim>> egw;
    // second moments for MC stderr (delta method), indexed like egw
    std::vector<std::array<double, 2 * kMaxDim>> sq_num;
    std::vector<double> sq_den;
    std::vector<std::array<double, 2 * kMaxDim>> cross;
    std::int64_t n = 0;
    bool mc = false;
};

std::int64_t checked_config_count(std::size_t atoms, std::size_t sites, std::int64_t cap) {
    double approx = std::pow(static_cast<double>(atoms), static_cast<double>(sites));
    if (approx > static_cast<double>(cap))
        throw budget_error("exact Kalikow enumeration needs " + std::to_string(approx) +
                           " configurations, cap is " + std::to_string(cap) +
                           "; use MonteCarlo mode");
    std::int64_t m = 1;
    for (std::size_t i = 0; i < sites; ++i) m *= static_cast<std::int64_t>(atoms);
    return m;
}

template <class PerConfig>
void enumerate_configs(const EnvironmentLaw& law, std::int64_t n_sites, std::int64_t cap,
                       PerConfig&& per_config) {
    const auto& support = law.support();
    const std::int64_t total =
        checked_config_count(support.size(), static_cast<std::size_t>(n_sites), cap);
    std::vector<int> choice(static_cast<std::size_t>(n_sites), 0);
    for (std::int64_t c = 0; c < total; ++c) {
        double prob = 1.0;
        for (int a : choice) prob *= support[static_cast<std::size_t>(a)].prob;
        per_config(choice, prob);
        for (std::int64_t i = 0; i < n_sites; ++i) {
            if (++choice[static_cast<std::size_t>(i)] < static_cast<int>(support.size())) break;
            choice[static_cast<std::size_t>(i)] = 0;
        }
    }
}

AnnealedGreen annealed_green(const EnvironmentLaw& law, const Domain& B, const Point& x,
                             KalikowMode mode, const KalikowOptions& opts, DenseKernel& kernel) {
    const auto& atoms = law.atom_vectors();
    const std::int64_t n = kernel.n;
    const int dc = kernel.dc;
    const std::int64_t src = B.interior_index(x);
    if (src < 0) throw config_error("Kalikow base point must lie in the domain");

    AnnealedGreen acc;
    acc.eg_int.resize(static_cast<std::size_t>(n));
    acc.eg_bnd.resize(B.boundary().size());
    acc.egw.resize(static_cast<std::size_t>(n));
    acc.mc = (mode == KalikowMode::MonteCarlo);
    if (acc.mc) {
        acc.sq_num.assign(static_cast<std::size_t>(n), {});
        acc.sq_den.assign(static_cast<std::size_t>(n), 0.0);
        acc.cross.assign(static_cast<std::size_t>(n), {});
    }

    std::vector<double> g_int, g_bnd;
    std::vector<int> choice(static_cast<std::size_t>(n));
    auto weights = [&](std::int64_t i, int e) {
        return atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])]
            .w[static_cast<std::size_t>(e)];
    };

    auto accumulate = [&](double prob) {
        kernel.factor_adjoint(weights);
        kernel.green(weights, src, g_int, g_bnd);
        for (std::int64_t i = 0; i < n; ++i) {
            const double g = g_int[static_cast<std::size_t>(i)];
            acc.eg_int[static_cast<std::size_t>(i)].add(prob * g);
            auto& row = acc.egw[static_cast<std::size_t>(i)];
            const ProbVector& w = atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])];
            for (int e = 0; e < dc; ++e) row[static_cast<std::size_t>(e)].add(prob * g * w.w[static_cast<std::size_t>(e)]);
            if (acc.mc) {
                acc.sq_den[static_cast<std::size_t>(i)] += g * g;
                for (int e = 0; e < dc; ++e) {
                    const double nume = g * w.w[static_cast<std::size_t>(e)];
                    acc.sq_num[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] += nume * nume;
                    acc.cross[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] += nume * g;
                }
            }
        }
        for (std::size_t b = 0; b < g_bnd.size(); ++b) acc.eg_bnd[b].add(prob * g_bnd[b]);
    };

    if (mode == KalikowMode::Exact) {
        enumerate_configs(law, n, opts.enum_cap, [&](const std::vector<int>& ch, double prob) {
            choice = ch;
            accumulate(prob);
        });
        acc.n = checked_config_count(law.support().size(), static_cast<std::size_t>(n), opts.enum_cap);
    } else {
        if (opts.mc_samples < 1) throw config_error("MonteCarlo mode needs at least one sample");
        const auto sites = B.interior();
        const double prob = 1.0 / static_cast<double>(opts.mc_samples);
        for (std::int64_t s = 0; s < opts.mc_samples; ++s) {
            const std::uint64_t env_id = derive_key({law.master_seed(), 0x4b414c4d43ULL, static_cast<std::uint64_t>(s)});
            for (std::int64_t i = 0; i < n; ++i)
                choice[static_cast<std::size_t>(i)] = law.site_atom(env_id, sites[static_cast<std::size_t>(i)]);
            accumulate(prob);
        }
        acc.n = opts.mc_samples;
    }
    return acc;
}

// Kalikow kernel view over the domain interior order.
struct KalikowView {
    const Domain* B;
    const std::vector<ProbVector>* vecs;
    int dimension() const { return B->dimension(); }
    const ProbVector& site(const Point& p) const {
        const std::int32_t i = B->interior_index(p);
        if (i < 0) throw config_error("Kalikow kernel queried outside its domain");
        return (*vecs)[static_cast<std::size_t>(i)];
    }
};

KalikowEnvironment environment_from(const AnnealedGreen& acc, const EnvironmentLaw& law,
                                    const Domain& B, const Point& x, KalikowMode mode) {
    KalikowEnvironment env;
    env.base = x;
    env.provenance = mode;
    env.n = acc.n;
    const int dc = direction_count(B.dimension());
    env.vectors.resize(acc.eg_int.size());
    if (acc.mc) env.stderr_.resize(acc.eg_int.size());
    for (std::size_t i = 0; i < acc.eg_int.size(); ++i) {
        const double den = acc.eg_int[i].value();
        // E g_B(x,y) > 0 is automatic under uniform ellipticity
        ProbVector v;
        v.d = law.dimension();
        for (int e = 0; e < dc; ++e)
            v.w[static_cast<std::size_t>(e)] = acc.egw[i][static_cast<std::size_t>(e)].value() / den;
        env.vectors[i] = v;
        if (acc.mc) {
            const double nn = static_cast<double>(acc.n);
            const double md = den;  // mean of g (already normalized by n via prob)
            const double var_d = std::max(0.0, acc.sq_den[i] / nn - md * md) / nn;
            for (int e = 0; e < dc; ++e) {
                const double mn = acc.egw[i][static_cast<std::size_t>(e)].value();
                const double var_n = std::max(0.0, acc.sq_num[i][static_cast<std::size_t>(e)] / nn - mn * mn) / nn;
                const double cov = (acc.cross[i][static_cast<std::size_t>(e)] / nn - mn * md) / nn;
                const double r = mn / md;
                const double var_r =
                    std::max(0.0, (var_n - 2.0 * r * cov + r * r * var_d) / (md * md));
                env.stderr_[i][static_cast<std::size_t>(e)] = std::sqrt(var_r);
            }
        }
    }
    return env;
}

}  // namespace

KalikowEnvironment kalikow_environment(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                       KalikowMode mode, const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    DenseKernel kernel(B);
    const AnnealedGreen acc = annealed_green(law, B, x, mode, opts, kernel);
    return environment_from(acc, law, B, x, mode);
}

KalikowFormulaReport verify_kalikow_formula(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                            const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    DenseKernel kernel(B);
    const AnnealedGreen acc = annealed_green(law, B, x, KalikowMode::Exact, opts, kernel);
    const KalikowEnvironment kenv = environment_from(acc, law, B, x, KalikowMode::Exact);

    const KalikowView view{&B, &kenv.vectors};
    const GreenRow rhs = green_row(EnvironmentView::of(view), B, x);

    KalikowFormulaReport rep;
    rep.n_configs = acc.n;
    for (std::size_t i = 0; i < acc.eg_int.size(); ++i)
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(acc.eg_int[i].value() - rhs.interior[i]));
    for (std::size_t b = 0; b < acc.eg_bnd.size(); ++b)
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(acc.eg_bnd[b].value() - rhs.boundary[b]));
    return rep;
}

KalikowCorollaryReport verify_kalikow_corollary(const EnvironmentLaw& law, const Domain& B,
                                                const Point& x, const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    DenseKernel kernel(B);
    const AnnealedGreen acc = annealed_green(law, B, x, KalikowMode::Exact, opts, kernel);
    const KalikowEnvironment kenv = environment_from(acc, law, B, x, KalikowMode::Exact);
    const KalikowView view{&B, &kenv.vectors};
    const GreenRow rhs = green_row(EnvironmentView::of(view), B, x);

    KalikowCorollaryReport rep;
    rep.n_configs = acc.n;
    KahanSum annealed_time, kalikow_time;
    for (std::size_t i = 0; i < acc.eg_int.size(); ++i) {
        annealed_time.add(acc.eg_int[i].value());
        kalikow_time.add(rhs.interior[i]);
    }
    rep.time_error = std::abs(annealed_time.value() - kalikow_time.value());
    KahanSum l1;
    for (std::size_t b = 0; b < acc.eg_bnd.size(); ++b)
        l1.add(std::abs(acc.eg_bnd[b].value() - rhs.boundary[b]));
    rep.exit_l1 = l1.value();
    rep.exit_tv = 0.5 * rep.exit_l1;
    return rep;
}

DriftVector kalikow_drift(const EnvironmentLaw& law, const Domain& B, const Point& x, const Point& y,
                          DriftMethod method, const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    const std::int64_t yi = B.interior_index(y);
    if (yi < 0) throw config_error("drift point must lie in the domain");

    if (method == DriftMethod::Direct) {
        const KalikowEnvironment kenv = kalikow_environment(law, B, x, KalikowMode::Exact, opts);
        return local_drift(kenv.vectors[static_cast<std::size_t>(yi)]);
    }

    // f-ratio route: per configuration, S(w) = sum_e w(y,e) f(y, y+e, w) with
    // f(y,z,w) = P_z(T_B <= H_y) / P_x(H_y < T_B); then
    // d_{B,x}(y) = E(d(y,w)/S) / E(1/S). The hitting probabilities come from
    // an absorption solve on B \ {y}.
    const auto sites = B.interior();
    const int d = law.dimension();
    const int dc = direction_count(d);
    std::vector<Point> reduced_sites;
    for (const Point& p : sites)
        if (!(p == y)) reduced_sites.push_back(p);

    const std::int64_t src = B.interior_index(x);
    const auto& atoms = law.atom_vectors();

    std::array<KahanSum, kMaxDim> num;
    KahanSum den;

    // dense system on B \ {y}: h(w) = P_w(T_B before H_y)
    const std::int64_t m = static_cast<std::int64_t>(reduced_sites.size());
    std::unordered_map<Point, std::int32_t, PointHash> ridx;
    for (std::int64_t i = 0; i < m; ++i) ridx.emplace(reduced_sites[static_cast<std::size_t>(i)], static_cast<std::int32_t>(i));

    Eigen::MatrixXd mat(m, m);
    Eigen::VectorXd rhs(m);
    std::vector<int> choice(sites.size());

    enumerate_configs(law, static_cast<std::int64_t>(sites.size()), opts.enum_cap,
                      [&](const std::vector<int>& ch, double prob) {
        choice = ch;
        // h on B \ {y}: absorb at the outer boundary (value 1) and at y (value 0)
        mat.setZero();
        rhs.setZero();
        for (std::int64_t i = 0; i < m; ++i) {
            const Point& p = reduced_sites[static_cast<std::size_t>(i)];
            const ProbVector& w = atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(B.interior_index(p))])];
            mat(i, i) = 1.0;
            for (int e = 0; e < dc; ++e) {
                const Point q = step(p, e);
                if (q == y) continue;  // absorbed at y with value 0
                const auto it = ridx.find(q);
                if (it != ridx.end()) {
                    mat(i, it->second) -= w.w[static_cast<std::size_t>(e)];
                } else if (B.interior_index(q) < 0) {
                    rhs(i) += w.w[static_cast<std::size_t>(e)];  // outer boundary, value 1
                }
            }
        }
        Eigen::VectorXd h;
        if (m > 0) h = mat.partialPivLu().solve(rhs);

        auto escape_prob = [&](const Point& z) -> double {  // P_z(T_B <= H_y)
            if (B.interior_index(z) < 0) return 1.0;
            if (z == y) return 0.0;
            return h(ridx.at(z));
        };

        const ProbVector& wy = atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(yi)])];
        double numerator_s = 0.0;  // sum_e w(y,e) P_{y+e}(T_B <= H_y)
        for (int e = 0; e < dc; ++e) numerator_s += wy.w[static_cast<std::size_t>(e)] * escape_prob(step(y, e));
        const double hit_from_x = (src == yi) ? 1.0 : 1.0 - h(ridx.at(x));  // P_x(H_y < T_B)
        const double s = numerator_s / hit_from_x;

        const DriftVector dy = local_drift(wy);
        for (int a = 0; a < d; ++a) num[static_cast<std::size_t>(a)].add(prob * dy.v[static_cast<std::size_t>(a)] / s);
        den.add(prob / s);
    });

    DriftVector out;
    out.d = d;
    for (int a = 0; a < d; ++a) out.v[static_cast<std::size_t>(a)] = num[static_cast<std::size_t>(a)].value() / den.value();
    return out;
}

std::vector<KalikowEnvironment> kalikow_environments_all_sources(const EnvironmentLaw& law,
                                                                 const Domain& B,
                                                                 const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    DenseKernel kernel(B);
    const auto& atoms = law.atom_vectors();
    const std::int64_t n = kernel.n;
    const int dc = kernel.dc;

    // accumulators per (source, site): E g and E(g w(., e))
    std::vector<std::vector<KahanSum>> eg(static_cast<std::size_t>(n),
                                          std::vector<KahanSum>(static_cast<std::size_t>(n)));
    std::vector<std::vector<std::array<KahanSum, 2 * kMaxDim>>> egw(
        static_cast<std::size_t>(n),
        std::vector<std::array<KahanSum, 2 * kMaxDim>>(static_cast<std::size_t>(n)));

    std::vector<int> choice(static_cast<std::size_t>(n));
    auto weights = [&](std::int64_t i, int e) {
        return atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])]
            .w[static_cast<std::size_t>(e)];
    };
    std::vector<double> g_int, g_bnd;
    enumerate_configs(law, n, opts.enum_cap, [&](const std::vector<int>& ch, double prob) {
        choice = ch;
        kernel.factor_adjoint(weights);
        for (std::int64_t src = 0; src < n; ++src) {
            kernel.green(weights, src, g_int, g_bnd);
            auto& eg_src = eg[static_cast<std::size_t>(src)];
            auto& egw_src = egw[static_cast<std::size_t>(src)];
            for (std::int64_t i = 0; i < n; ++i) {
                const double g = g_int[static_cast<std::size_t>(i)];
                eg_src[static_cast<std::size_t>(i)].add(prob * g);
                const ProbVector& w = atoms[static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])];
                for (int e = 0; e < dc; ++e)
                    egw_src[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)].add(
                        prob * g * w.w[static_cast<std::size_t>(e)]);
            }
        }
    });

    std::vector<KalikowEnvironment> out(static_cast<std::size_t>(n));
    const auto sites = B.interior();
    for (std::int64_t src = 0; src < n; ++src) {
        KalikowEnvironment& kenv = out[static_cast<std::size_t>(src)];
        kenv.base = sites[static_cast<std::size_t>(src)];
        kenv.provenance = KalikowMode::Exact;
        kenv.vectors.resize(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            const double den = eg[static_cast<std::size_t>(src)][static_cast<std::size_t>(i)].value();
            ProbVector v;
            v.d = law.dimension();
            for (int e = 0; e < dc; ++e)
                v.w[static_cast<std::size_t>(e)] =
                    egw[static_cast<std::size_t>(src)][static_cast<std::size_t>(i)][static_cast<std::size_t>(e)]
                        .value() /
                    den;
            kenv.vectors[static_cast<std::size_t>(i)] = v;
        }
    }
    return out;
}

DriftBoundReport drift_bound_report(const EnvironmentLaw& law, std::int64_t n_domains,
                                    std::int64_t max_size, std::uint64_t salt,
                                    const KalikowOptions& opts) {
    const int d = law.dimension();
    DriftBoundReport rep;
    rep.lambda = law.lambda();
    const double eps = law.epsilon();
    rep.bound = eps * eps / d;
    rep.proof_lower = rep.lambda - 2.0 * eps * eps / (3.0 * d) + 2.0 * eps * eps * eps * eps / 3.0;
    rep.proof_upper = rep.lambda + 2.0 * eps * eps / (3.0 * d) + eps * eps * eps / (3.0 * d);
    rep.min_drift_e1 = 1e300;

    for (std::int64_t k = 0; k < n_domains; ++k) {
        const std::uint64_t key = derive_key({law.master_seed(), 0x444f4d41494eULL, salt, static_cast<std::uint64_t>(k)});
        RandomStream rs(key);
        const std::int64_t size = 1 + static_cast<std::int64_t>(rs.next_unit() * static_cast<double>(max_size));
        const std::vector<Point> sites = random_connected_set(d, std::min(size, max_size), key ^ 1);
        Domain B = Domain::explicit_sites(d, sites);
        const auto envs = kalikow_environments_all_sources(law, B, opts);
        for (const KalikowEnvironment& kenv : envs) {
            for (const ProbVector& v : kenv.vectors) {
                const double de1 = local_drift(v).e1();
                rep.max_deviation = std::max(rep.max_deviation, std::abs(de1 - rep.lambda));
                rep.min_drift_e1 = std::min(rep.min_drift_e1, de1);
                if (de1 < rep.proof_lower - 1e-12 || de1 > rep.proof_upper + 1e-12)
                    rep.within_proof_interval = false;
                ++rep.triples;
            }
        }
        ++rep.domains;
    }
    rep.margin = rep.bound - rep.max_deviation;
    return rep;
}

TruncationCheck kalikow_truncation_check(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                         int k_max, const KalikowOptions& opts) {
    B.materialize(1 << 22);
    require_connected(B);
    DenseKernel kernel(B);
    const AnnealedGreen acc = annealed_green(law, B, x, KalikowMode::Exact, opts, kernel);
    const KalikowEnvironment kenv = environment_from(acc, law, B, x, KalikowMode::Exact);

    const auto sites = B.interior();
    const auto bnd = B.boundary();
    const int dc = direction_count(B.dimension());
    const std::size_t n = sites.size();
    const std::size_t nb = bnd.size();
    const std::int64_t src = B.interior_index(x);

    TruncationCheck check;
    check.iterations = k_max;
    std::vector<double> cur_int(n, 0.0), cur_bnd(nb, 0.0), nxt_int(n), nxt_bnd(nb);
    cur_int[static_cast<std::size_t>(src)] = 1.0;  // g^(0) = 1_x

    for (int k = 0; k < k_max; ++k) {
        std::fill(nxt_int.begin(), nxt_int.end(), 0.0);
        std::fill(nxt_bnd.begin(), nxt_bnd.end(), 0.0);
        nxt_int[static_cast<std::size_t>(src)] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = cur_int[i];
            if (g == 0.0) continue;
            const ProbVector& w = kenv.vectors[i];
            for (int e = 0; e < dc; ++e) {
                const Point q = step(sites[i], e);
                const std::int32_t j = B.interior_index(q);
                if (j >= 0) {
                    nxt_int[static_cast<std::size_t>(j)] += g * w.w[static_cast<std::size_t>(e)];
                } else {
                    const std::int32_t b = B.boundary_index(q);
                    if (b >= 0) nxt_bnd[static_cast<std::size_t>(b)] += g * w.w[static_cast<std::size_t>(e)];
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (nxt_int[i] < cur_int[i] - 1e-12) check.monotone = false;
            if (nxt_int[i] > acc.eg_int[i].value() + 1e-12) check.bounded = false;
        }
        for (std::size_t b = 0; b < nb; ++b) {
            if (nxt_bnd[b] < cur_bnd[b] - 1e-12) check.monotone = false;
            if (nxt_bnd[b] > acc.eg_bnd[b].value() + 1e-12) check.bounded = false;
        }
        cur_int.swap(nxt_int);
        cur_bnd.swap(nxt_bnd);
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, acc.eg_int[i].value() - cur_int[i]);
    check.final_gap = gap;
    return check;
}

std::vector<Point> random_connected_set(int d, std::int64_t size, std::uint64_t key) {
    if (size < 1) throw config_error("connected set size must be >= 1");
    RandomStream rs(key);
    std::vector<Point> sites{Point::zero(d)};
    std::unordered_map<Point, char, PointHash> in;
    in.emplace(sites[0], 1);
    std::vector<Point> frontier;
    while (static_cast<std::int64_t>(sites.size()) < size) {
        frontier.clear();
        for (const Point& p : sites) {
            for (int e = 0; e < direction_count(d); ++e) {
                const Point q = step(p, e);
                if (!in.count(q)) frontier.push_back(q);
            }
        }
        // deterministic pick; duplicates in the frontier just bias growth
        // toward better-connected sites, which is fine for sampling
        const std::size_t pick = static_cast<std::size_t>(rs.next_unit() * static_cast<double>(frontier.size()));
        const Point q = frontier[std::min(pick, frontier.size() - 1)];
        in.emplace(q, 1);
        sites.push_back(q);
    }
    return sites;
}

}  // namespace rwre
