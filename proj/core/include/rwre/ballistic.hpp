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
#include <optional>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/green.hpp"
#include "rwre/lattice.hpp"
#include "rwre/stats.hpp"
#include "rwre/walker.hpp"

namespace rwre {

// Probability that a p-biased nearest-neighbor walk on Z started at 0 exits
// the interval [-a, b] through -a. p = 1/2 takes the symmetric limit branch.
double gambler_exit_left(std::int64_t a, std::int64_t b, double p);

// Algebraically equivalent closed form (valid for p != 1/2):
// (1-p)^a (p^b - (1-p)^b) / (p^{a+b} - (1-p)^{a+b}).
double gambler_exit_left_alt(std::int64_t a, std::int64_t b, double p);

struct PolynomialProbeReport {
    std::int64_t M = 0;
    std::int64_t K = 0;
    double threshold = 0.0;      // M^-K
    double m0 = 0.0;             // exp(100 + 4d (log kappa)^2)
    bool below_m0 = true;        // desk scale flag: M < M0
    std::int64_t sampled_points = 0;
    std::int64_t population = 0;  // |B*_M|
    std::int64_t n_walks = 0;     // per starting point
    double sup_estimate = 0.0;    // max over sampled x of the non-frontal fraction
    double sup_upper = 0.0;       // max Wilson upper (z = 3)
    double sup_lower = 0.0;       // corresponding Wilson lower
    std::string verdict;          // pass | fail | inconclusive
};

// Probes sup_{x in B*_M} P_x(exit of B_M not through the frontal side)
// against M^-K with annealed walks on a covering subsample of B*_M.
PolynomialProbeReport polynomial_condition_probe(const EnvironmentLaw& law, std::int64_t M,
                                                 std::int64_t K, std::int64_t n_walks,
                                                 std::int64_t max_points = 24, std::uint64_t salt = 0,
                                                 std::int64_t step_cap = kDefaultStepCap,
                                                 int threads = 1);

struct TGammaPoint {
    std::int64_t M = 0;
    std::int64_t left_exits = 0;
    std::int64_t n = 0;
    double p_hat = 0.0;
    bool censored = false;  // zero counts at this M
};

struct TGammaReport {
    double gamma = 1.0;
    std::vector<TGammaPoint> points;
    double slope = 0.0;         // OLS of -log p_hat on M^gamma, uncensored prefix
    double slope_stderr = 0.0;
    std::int64_t used_points = 0;
    std::string note;           // direction restriction and asymptotic-heuristic label
};

// Slab left-exit decay along e1. A positive slope supports the gamma-stretched
// exponential decay; this is a heuristic probe of an asymptotic condition.
TGammaReport t_gamma_probe(const EnvironmentLaw& law, double gamma,
                           const std::vector<std::int64_t>& M_list, std::int64_t n_walks,
                           std::int64_t transverse_cap = 0, std::uint64_t salt = 0,
                           std::int64_t step_cap = kDefaultStepCap, int threads = 1);

struct AnnealedGreenDrift {
    MCEstimate estimate;        // E(G[d.e1](0)) over environments
    std::int64_t cap_used = 0;
    std::int64_t L = 0;
};

// Exact per-environment Green-operator value on the +-L strip, averaged over
// sampled environments.
AnnealedGreenDrift annealed_green_drift(const EnvironmentLaw& law, std::int64_t L,
                                        std::int64_t n_envs, std::int64_t cap = 0,
                                        std::uint64_t salt = 0, const SolveOptions& solve = {});

struct PPlusMinus {
    double p_minus = 0.0;
    double p_plus = 1.0;
    double two_p_minus_one_minus = 0.0;  // 2 p_- - 1
    double two_p_minus_one_plus = 0.0;   // 2 p_+ - 1
    double offset = 0.0;                 // eps^{alpha(d)-2-delta} (or override)
    AnnealedGreenDrift drift;
};

// p_-, p_+ thresholds: 1/2 + (E(G[d.e1](0)) -+ offset)/(2L), clamped to [0,1].
// The exponent alpha(d)-2-delta can be overridden (kept configurable since the
// source text uses two variants).
PPlusMinus p_plus_minus(const EnvironmentLaw& law, double delta, std::int64_t L, std::int64_t n_envs,
                        std::optional<double> exponent_override = std::nullopt,
                        std::uint64_t salt = 0);

struct RescaledTrajectory {
    std::vector<Point> y_points;             // Y_k = X_{W_k}
    std::vector<Point> z_points;             // Z_k = X_{V_k}, frozen after box exit
    std::vector<std::int64_t> w_times;
    std::vector<std::int64_t> v_times;
    std::vector<std::int64_t> companion;     // companion walk positions y_k
};

struct CoupledRunOptions {
    std::int64_t L = 4;
    PhatOptions phat_opts;
    std::int64_t step_cap = kDefaultStepCap;
    std::int64_t max_y_steps = 100'000;
};

struct CoupledRunResult {
    RescaledTrajectory traj;
    bool completed = false;            // box exit reached
    bool hypothesis_all = true;        // p <= phat held at every visited rescale point
    std::int64_t hypothesis_checked = 0;
    std::int64_t hypothesis_failures = 0;
    std::int64_t domination_violations = 0;  // companion right but Y left while p <= phat
    bool dominated = true;             // Y.e1 - Y0.e1 >= L * companion throughout
    bool cap_flagged = false;          // some phat strip exceeded its leakage tolerance
    Side exit_side = Side::Other;
};

// Coupling to the right of the rescaled walk Y with a p-biased companion: one
// shared uniform per rescale step, with P(both jump right) = min(phat, p).
// phat is computed by exact solve at every visited rescale point, which makes
// the domination certificate pathwise-checkable.
CoupledRunResult coupled_rescaled_run(const EnvironmentLaw& law, std::uint64_t env_id,
                                      const Domain& box, const Point& start, double p,
                                      std::uint64_t stream_id, const CoupledRunOptions& opts);

}  // namespace rwre
