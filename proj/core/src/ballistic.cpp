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

#include "rwre/ballistic.hpp"

#include <cmath>
#include <unordered_map>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

namespace rwre {

double gambler_exit_left(std::int64_t a, std::int64_t b, double p) {
    if (a < 1 || b < 1) throw config_error("gambler interval requires a, b >= 1");
    if (!(p > 0.0 && p < 1.0)) throw config_error("gambler jump probability must be in (0,1)");
    if (p == 0.5) return static_cast<double>(b) / static_cast<double>(a + b);
    const double rho = (1.0 - p) / p;
    const double ra = std::pow(rho, static_cast<double>(a));
    const double rb = std::pow(rho, static_cast<double>(b));
    return ra * (1.0 - rb) / (1.0 - ra * rb);
}

double gambler_exit_left_alt(std::int64_t a, std::int64_t b, double p) {
    if (a < 1 || b < 1) throw config_error("gambler interval requires a, b >= 1");
    if (!(p > 0.0 && p < 1.0) || p == 0.5) throw config_error("alternative form requires p in (0,1) \\ {1/2}");
    const double q = 1.0 - p;
    const double pa = std::pow(p, static_cast<double>(a + b));
    const double qa = std::pow(q, static_cast<double>(a + b));
    return std::pow(q, static_cast<double>(a)) *
           (std::pow(p, static_cast<double>(b)) - std::pow(q, static_cast<double>(b))) / (pa - qa);
}

namespace {

// deterministic sample of points in B*_M(0): the back-side center first, then
// keyed draws over the region
std::vector<Point> sample_middle_frontal(int d, std::int64_t M, std::int64_t max_points,
                                         std::uint64_t key) {
    const std::int64_t m3 = M * M * M;
    std::vector<Point> pts;
    Point base = Point::zero(d);
    base.c[0] = M / 2;
    pts.push_back(base);  // worst case for the back exit
    Point front = Point::zero(d);
    front.c[0] = M - 1;
    pts.push_back(front);
    RandomStream rs(key);
    while (static_cast<std::int64_t>(pts.size()) < max_points) {
        Point p = Point::zero(d);
        p.c[0] = M / 2 + static_cast<std::int64_t>(rs.next_unit() * static_cast<double>(M - M / 2));
        for (int i = 1; i < d; ++i)
            p.c[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>((rs.next_unit() * 2.0 - 1.0) * static_cast<double>(m3 - 1));
        pts.push_back(p);
    }
    return pts;
}

}  // namespace

PolynomialProbeReport polynomial_condition_probe(const EnvironmentLaw& law, std::int64_t M,
                                                 std::int64_t K, std::int64_t n_walks,
                                                 std::int64_t max_points, std::uint64_t salt,
                                                 std::int64_t step_cap, int threads) {
    if (M < 2 || M % 2 != 0) throw config_error("polynomial probe requires even M >= 2");
    const int d = law.dimension();
    PolynomialProbeReport rep;
    rep.M = M;
    rep.K = K;
    rep.threshold = std::pow(static_cast<double>(M), -static_cast<double>(K));
    const double log_kappa = std::log(1.0 / (4.0 * d));
    rep.m0 = std::exp(100.0 + 4.0 * d * log_kappa * log_kappa);
    rep.below_m0 = static_cast<double>(M) < rep.m0;
    rep.n_walks = n_walks;

    const std::int64_t m3 = M * M * M;
    const double pop = static_cast<double>(M - M / 2) *
                       std::pow(2.0 * static_cast<double>(m3) - 1.0, static_cast<double>(d - 1));
    rep.population = pop < 9e18 ? static_cast<std::int64_t>(pop) : std::int64_t{9'000'000'000'000'000'000};
    const Domain box = Domain::box(d, M, Point::zero(d));
    const auto points = sample_middle_frontal(d, M, max_points,
                                              derive_key({law.master_seed(), 0x504b505453ULL, salt}));
    rep.sampled_points = static_cast<std::int64_t>(points.size());

    bool any_fail = false;
    bool all_pass = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ExitDistribution dist =
            estimate_exit_distribution(law, box, points[i], n_walks, salt ^ (0x50 + i), step_cap, threads);
        std::int64_t frontal = 0;
        if (auto it = dist.counts.find("frontal"); it != dist.counts.end()) frontal = it->second;
        const std::int64_t non_frontal = dist.n_walks - frontal;  // cap hits count as unconfirmed
        const double est = static_cast<double>(non_frontal) / static_cast<double>(dist.n_walks);
        const WilsonInterval w = wilson_interval(non_frontal, dist.n_walks, 3.0);
        if (est >= rep.sup_estimate) {
            rep.sup_estimate = est;
            rep.sup_lower = w.lower;
        }
        rep.sup_upper = std::max(rep.sup_upper, w.upper);
        if (w.lower > rep.threshold) any_fail = true;
        if (!(w.upper <= rep.threshold)) all_pass = false;
    }
    rep.verdict = any_fail ? "fail" : (all_pass ? "pass" : "inconclusive");
    return rep;
}

TGammaReport t_gamma_probe(const EnvironmentLaw& law, double gamma,
                           const std::vector<std::int64_t>& M_list, std::int64_t n_walks,
                           std::int64_t transverse_cap, std::uint64_t salt, std::int64_t step_cap,
                           int threads) {
    if (M_list.size() < 3) throw config_error("t_gamma probe wants at least 3 slab widths");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw config_error("gamma must be in (0,1]");
    TGammaReport rep;
    rep.gamma = gamma;
    rep.note = "probed along e1 only; asymptotic condition, heuristic slope";

    for (std::size_t i = 0; i < M_list.size(); ++i) {
        const std::int64_t M = M_list[i];
        const std::int64_t cap = transverse_cap > 0 ? transverse_cap : 16 * M;
        const Domain slab = Domain::slab(law.dimension(), Direction{0, +1}, M, Point::zero(law.dimension()), cap);
        const ExitDistribution dist =
            estimate_exit_distribution(law, slab, Point::zero(law.dimension()), n_walks,
                                       salt ^ (0x54 + i), step_cap, threads);
        TGammaPoint pt;
        pt.M = M;
        pt.n = dist.n_walks;
        if (auto it = dist.counts.find("back"); it != dist.counts.end()) pt.left_exits = it->second;
        pt.p_hat = static_cast<double>(pt.left_exits) / static_cast<double>(pt.n);
        pt.censored = (pt.left_exits == 0);
        rep.points.push_back(pt);
    }

    // OLS of -log p on M^gamma over the uncensored prefix
    std::vector<double> xs, ys;
    for (const auto& pt : rep.points) {
        if (pt.censored) break;
        xs.push_back(std::pow(static_cast<double>(pt.M), gamma));
        ys.push_back(-std::log(pt.p_hat));
    }
    rep.used_points = static_cast<std::int64_t>(xs.size());
    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        rep.slope = sxy / sxx;
        if (xs.size() > 2) {
            double ss = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double r = ys[i] - my - rep.slope * (xs[i] - mx);
                ss += r * r;
            }
            rep.slope_stderr = std::sqrt(ss / (static_cast<double>(xs.size() - 2) * sxx));
        }
    }
    return rep;
}

AnnealedGreenDrift annealed_green_drift(const EnvironmentLaw& law, std::int64_t L,
                                        std::int64_t n_envs, std::int64_t cap, std::uint64_t salt,
                                        const SolveOptions& solve) {
    if (L < 1 || n_envs < 1) throw config_error("annealed Green drift needs L >= 1 and n_envs >= 1");
    AnnealedGreenDrift out;
    out.L = L;
    out.cap_used = cap > 0 ? cap : 8 * L;
    const Domain strip = Domain::strip(law.dimension(), L, Point::zero(law.dimension()), out.cap_used);
    strip.materialize(std::max(solve.direct_budget, solve.iter_budget));
    std::vector<double> samples(static_cast<std::size_t>(n_envs));
    for (std::int64_t k = 0; k < n_envs; ++k) {
        const SampledEnvironment env{&law, derive_key({law.master_seed(), 0x4147445256ULL, salt, static_cast<std::uint64_t>(k)})};
        const EnvironmentView view = EnvironmentView::of(env);
        const GreenRow row = green_row(view, strip, Point::zero(law.dimension()), solve);
        samples[static_cast<std::size_t>(k)] = green_drift_e1(view, row, strip);
    }
    out.estimate = mc_from_samples(samples);
    return out;
}

PPlusMinus p_plus_minus(const EnvironmentLaw& law, double delta, std::int64_t L, std::int64_t n_envs,
                        std::optional<double> exponent_override, std::uint64_t salt) {
    if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must be in (0,1)");
    PPlusMinus out;
    out.drift = annealed_green_drift(law, L, n_envs, 0, salt);
    const double expo =
        exponent_override ? *exponent_override : drift_exponent_alpha(law.dimension()) - 2.0 - delta;
    out.offset = std::pow(law.epsilon(), expo);
    const double eg = out.drift.estimate.mean;
    out.p_minus = std::max(0.0, 0.5 + (eg - out.offset) / (2.0 * static_cast<double>(L)));
    out.p_plus = std::min(1.0, 0.5 + (eg + out.offset) / (2.0 * static_cast<double>(L)));
    out.two_p_minus_one_minus = 2.0 * out.p_minus - 1.0;
    out.two_p_minus_one_plus = 2.0 * out.p_plus - 1.0;
    return out;
}

CoupledRunResult coupled_rescaled_run(const EnvironmentLaw& law, std::uint64_t env_id,
                                      const Domain& box, const Point& start, double p,
                                      std::uint64_t stream_id, const CoupledRunOptions& opts) {
    if (!(p >= 0.0 && p <= 1.0)) throw config_error("companion bias p must be in [0,1]");
    if (!box.interior_contains(start)) throw config_error("start must be inside the box");
    const std::int64_t L = opts.L;
    if (L < 1) throw config_error("rescale length must be >= 1");

    const SampledEnvironment env{&law, env_id};
    const EnvironmentView view = EnvironmentView::of(env);
    RandomStream walk_rs(derive_key({law.master_seed(), 0x434f55504cULL, env_id, stream_id}));
    RandomStream aux_rs(derive_key({law.master_seed(), 0x434f5550aaULL, env_id, stream_id}));
    PhatOptions phat_opts = opts.phat_opts;
    if (phat_opts.cap == 0) phat_opts.cap = 12 * L;  // fixed cap; leakage still measured

    CoupledRunResult res;
    res.traj.y_points.push_back(start);
    res.traj.z_points.push_back(start);
    res.traj.w_times.push_back(0);
    res.traj.v_times.push_back(0);
    res.traj.companion.push_back(0);

    std::unordered_map<Point, PhatResult, PointHash> phat_cache;
    Point x = start;
    Point anchor = start;
    std::int64_t n = 0;
    std::int64_t companion_pos = 0;
    bool box_exited = false;

    while (!box_exited && static_cast<std::int64_t>(res.traj.y_points.size()) <= opts.max_y_steps) {
        // phat at the current rescale point, exact solve (cached per point)
        auto it = phat_cache.find(anchor);
        if (it == phat_cache.end()) {
            it = phat_cache.emplace(anchor, phat(view, anchor, L, phat_opts)).first;
        }
        const PhatResult& ph = it->second;
        if (ph.flagged) res.cap_flagged = true;
        const bool hypothesis = (p <= ph.direct);
        ++res.hypothesis_checked;
        if (!hypothesis) {
            res.hypothesis_all = false;
            ++res.hypothesis_failures;
        }

        // run X until |(X - anchor).e1| = L or box exit or step cap
        bool jump_right = false;
        bool jumped = false;
        while (n < opts.step_cap) {
            const ProbVector& w = env.site(x);
            double u = walk_rs.next_unit();
            int e = direction_count(w.d) - 1;
            for (int k = 0; k < direction_count(w.d); ++k) {
                u -= w.w[static_cast<std::size_t>(k)];
                if (u < 0.0) {
                    e = k;
                    break;
                }
            }
            x = step(x, e);
            ++n;
            if (!box.interior_contains(x)) {
                box_exited = true;
                res.exit_side = box.classify_exit(x);
                break;
            }
            const std::int64_t dx = x.c[0] - anchor.c[0];
            if (dx >= L || dx <= -L) {
                jump_right = dx >= L;
                jumped = true;
                break;
            }
        }
        if (!jumped && !box_exited) break;  // step cap hit mid-jump

        if (jumped) {
            // one shared uniform: u < phat  <=>  Y jumped right; the companion
            // jumps right on u < p, so p <= phat forces companion-right => Y-right
            const double v = aux_rs.next_unit();
            const double u = jump_right ? v * ph.direct : ph.direct + v * (1.0 - ph.direct);
            const bool companion_right = u < p;
            if (companion_right && hypothesis && !jump_right) ++res.domination_violations;
            companion_pos += companion_right ? 1 : -1;

            anchor = x;
            res.traj.y_points.push_back(x);
            res.traj.w_times.push_back(n);
            res.traj.companion.push_back(companion_pos);
            res.traj.z_points.push_back(x);
            res.traj.v_times.push_back(n);
            const std::int64_t y_disp = x.c[0] - start.c[0];
            if (y_disp < L * companion_pos) res.dominated = false;
        } else if (box_exited) {
            // Z freezes at the box exit point; Y has no completed jump here
            res.traj.z_points.push_back(x);
            res.traj.v_times.push_back(n);
        }
    }
    res.completed = box_exited;
    return res;
}

}  // namespace rwre
