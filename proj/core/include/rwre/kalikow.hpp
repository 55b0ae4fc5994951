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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

// Kalikow's auxiliary walk on a finite connected B: the homogeneous-in-law
// kernel w_B^x(y,e) = E(g_B(x,y,w) w(y,e)) / E(g_B(x,y,w)) whose killed
// Green's function reproduces the annealed one.

struct KalikowOptions {
    std::int64_t enum_cap = 1 << 20;  // max configurations in exact mode
    std::int64_t mc_samples = 100'000;
};

enum class KalikowMode { Exact, MonteCarlo };

struct KalikowEnvironment {
    Point base;                        // the source x
    std::vector<ProbVector> vectors;   // aligned with domain interior order
    KalikowMode provenance = KalikowMode::Exact;
    std::int64_t n = 0;                // configurations enumerated or samples drawn
    // componentwise delta-method stderr (MonteCarlo mode only)
    std::vector<std::array<double, 2 * kMaxDim>> stderr_;
};

KalikowEnvironment kalikow_environment(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                       KalikowMode mode, const KalikowOptions& opts = {});

struct KalikowFormulaReport {
    double max_abs_error = 0.0;  // over y in B and its boundary
    std::int64_t n_configs = 0;
};

// Both sides of E(g_B(x,y)) = g_B(x,y,w_B^x): the left by exact enumeration,
// the right by one Green solve in the Kalikow environment.
KalikowFormulaReport verify_kalikow_formula(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                            const KalikowOptions& opts = {});

struct KalikowCorollaryReport {
    double time_error = 0.0;     // |E_x(T_B) - E_{x,w_B^x}(T_B)|
    double exit_tv = 0.0;        // total variation between the exit laws
    double exit_l1 = 0.0;        // plain L1 sum over the boundary
    std::int64_t n_configs = 0;
};

KalikowCorollaryReport verify_kalikow_corollary(const EnvironmentLaw& law, const Domain& B,
                                                const Point& x, const KalikowOptions& opts = {});

enum class DriftMethod { Direct, FRatio };

// Drift of Kalikow's walk at y, either straight from w_B^x or through the
// hitting-probability ratio representation (independent solves).
DriftVector kalikow_drift(const EnvironmentLaw& law, const Domain& B, const Point& x, const Point& y,
                          DriftMethod method, const KalikowOptions& opts = {});

struct DriftBoundReport {
    double lambda = 0.0;
    double bound = 0.0;          // eps^2 / d
    double max_deviation = 0.0;  // max |d_{B,x}(y).e1 - lambda|
    double margin = 0.0;         // bound - max_deviation
    double min_drift_e1 = 0.0;   // Kalikow-condition witness (sampled family only)
    std::int64_t domains = 0;
    std::int64_t triples = 0;
    // sharper intermediate bounds from the proof, as diagnostics
    double proof_lower = 0.0;    // lambda - (2/(3d)) eps^2 + (2/3) eps^4
    double proof_upper = 0.0;    // lambda + (2/(3d)) eps^2 + (1/(3d)) eps^3
    bool within_proof_interval = true;
};

// Samples random connected domains containing 0 (|B| <= max_size), enumerates
// each exactly, and audits |d_{B,x}(y).e1 - lambda| <= eps^2/d over all x, y.
DriftBoundReport drift_bound_report(const EnvironmentLaw& law, std::int64_t n_domains,
                                    std::int64_t max_size, std::uint64_t salt = 0,
                                    const KalikowOptions& opts = {});

// Exact Kalikow kernels for every base point of B in one enumeration pass
// (one factorization per configuration, one solve per source).
std::vector<KalikowEnvironment> kalikow_environments_all_sources(const EnvironmentLaw& law,
                                                                 const Domain& B,
                                                                 const KalikowOptions& opts = {});

struct TruncationCheck {
    bool monotone = true;       // iterates nondecreasing in k
    bool bounded = true;        // iterates <= E g_B(x,y) + tol
    double final_gap = 0.0;     // max over y of E g - g^(k_max)
    int iterations = 0;
};

// Runs the truncated fixed-point iterates g^(k) of the Kalikow Green
// recursion explicitly and checks monotonicity and the annealed upper bound.
TruncationCheck kalikow_truncation_check(const EnvironmentLaw& law, const Domain& B, const Point& x,
                                         int k_max, const KalikowOptions& opts = {});

// Random connected subset of Z^d containing the origin, grown site by site.
std::vector<Point> random_connected_set(int d, std::int64_t size, std::uint64_t key);

}  // namespace rwre
