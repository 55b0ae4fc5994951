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

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

// Renormalization scale sequences: N_k = a_k N'_k, N'_{k+1} = b_k N'_k, with
// the concrete choice a_{k+1} = (k+1+K)^3, b_k = a_k (k+1+K)^2, K = 22[eps^-6].
// The sizes grow super-exponentially, so everything is exact big-integer.
struct ScaleSequence {
    double epsilon = 0.0;
    double theta = 0.5;
    long K = 0;
    bool k_overridden = false;
    std::int64_t L = 0;   // 2 [theta/eps]
    std::int64_t N = 0;   // L^3
    std::int64_t N0 = 0;  // N L
    int k_max = 0;
    std::vector<mpz_class> a;        // 0..k_max+1
    std::vector<mpz_class> b;        // 0..k_max
    std::vector<mpz_class> alpha;    // 0..k_max
    std::vector<mpz_class> n_k;      // N_k, 0..k_max+1
    std::vector<mpz_class> n_prime;  // N'_k, 0..k_max+1
};

ScaleSequence make_scale_sequence(double epsilon, int k_max,
                                  std::optional<long> K_override = std::nullopt,
                                  double theta = 0.5);

struct ConditionEntry {
    bool holds = true;
    long first_violation = -1;
    std::string detail;
};

struct ConditionAudit {
    std::map<std::string, ConditionEntry> entries;  // "C1".."C7"
    double c4_sup = 0.0;           // sup over range of log(alpha_k)/a_k
    double c6_constant = 0.0;      // smallest c_* on the materialized range
    double c7_product = 1.0;       // exact product, rounded to double
    double c7_constant_eps3 = 0.0; // (1 - product)/eps^3
    double c7_constant_eps6 = 0.0; // the sharper exponent of the concrete choice
};

// Checks C1-C7 with exact rational arithmetic and directed-rounding MPFR for
// the logarithmic terms, so a "holds" verdict is certified on the range.
ConditionAudit verify_conditions(const ScaleSequence& seq);

// Xi_k = prod_{j=1..k} (1 - 1/(j+1)^2), exact rational.
mpq_class xi_k(long k);

struct BadProbRecursion {
    std::vector<double> m;        // m_k = m0 - 12 d sum_{j<=k} log(N_j)/2^j
    double inf_m = 0.0;
    bool positive = false;        // inf m_k > 0
    bool certified = true;        // m_{k-1} 2^k - 6 d log(2 N_k) >= m_k 2^k for all k
    double tail_sum = 0.0;        // 12 d sum log(N_j)/2^j over the range
};

// The doubling recursion q_k <= (2 N_k)^{6d} q_{k-1}^2 turned into the
// explicit m_k sequence with the implication checked term by term.
BadProbRecursion bad_prob_recursion(const ScaleSequence& seq, double m0, int d);

struct Box0Params {
    double theta = 0.5;
    double delta = 0.25;
    double c2 = 1.0;            // frontal-exit rate constant (configured, not derived)
    double c4 = 1.0;            // exit-time window constant (configured, not derived)
    double lambda_power = 2.0;  // exponent of lambda in the time threshold
    std::int64_t L_override = 0;
    std::int64_t n_walks = 2000;
    std::int64_t sample_points = 12;
    std::int64_t step_cap = 2'000'000;
};

struct BoxVerdict {
    int level = 0;
    Point anchor;
    std::string verdict;  // good | bad | inconclusive
    double frontal_threshold = 0.0;
    double time_threshold = 0.0;
    double min_frontal_estimate = 1.0;
    double min_frontal_lower = 1.0;   // Wilson z=3
    double min_frontal_upper = 1.0;
    double min_time_estimate = 0.0;
    double min_time_stderr = 0.0;
    std::int64_t n_walks = 0;
    std::int64_t sampled_points = 0;
    std::int64_t cap_hits = 0;
    std::string constants;  // the thresholds' provenance, embedded for reproducibility
};

// Empirical classification of a 0-box for one quenched environment: frontal
// exits from the middle-frontal part and exit times from its back side,
// against the two configured thresholds.
BoxVerdict classify_box0(const EnvironmentLaw& law, std::uint64_t env_id, const Point& anchor,
                         const Box0Params& params, std::uint64_t salt = 0, int threads = 1);

struct LevelVerdicts {
    LevelGeometry geom;  // child level geometry (N_k, N'_k)
    std::vector<std::pair<CellIndex, bool>> cells;  // partition cell -> good?
};

// Exact combinatorial step: the parent box is good iff a single child-scale
// box (any anchor) intersects every bad child box. Reduced to per-axis
// interval intersection of admissible anchors. An incomplete verdict map over
// the cells meeting the parent yields "inconclusive".
BoxVerdict classify_box_k(const LevelVerdicts& child, std::int64_t parent_M, const Point& parent_anchor,
                          int parent_level);

}  // namespace rwre
