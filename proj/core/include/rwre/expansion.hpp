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
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Low-disorder velocity expansion around the simple symmetric walk:
// v = d0 + eps d1 + eps^2 d2 + higher order, with
// d2 assembled from the perturbation covariance C and the full-lattice
// Green differences J_e = g(e,0) - g(0,0).

struct CovarianceMatrix {
    int d = 0;
    std::vector<double> c;  // (2d) x (2d), row-major by direction index
    double at(int e, int f) const { return c[static_cast<std::size_t>(e * 2 * d + f)]; }
    double max_row_sum_abs() const;
    double max_asymmetry() const;
};

CovarianceMatrix covariance_matrix(const EnvironmentLaw& law);

struct ExpansionTerms {
    std::vector<double> d0;  // zero for the symmetric base kernel
    std::vector<double> d1;  // sum_e E(xi(0,e)) e
    std::vector<double> d2;  // sum_e (sum_f C_{e,f} J_f) e
    CovarianceMatrix C;
    std::vector<double> J;       // per direction index
    double j_error = 0.0;        // truncation error bar (max over directions)
    double j_anisotropy = 0.0;   // max_e |J_e - J_{e'}|
    std::int64_t radius = 0;
};

// Requires d >= 3 (J undefined for the recurrent case).
ExpansionTerms expansion_terms(const EnvironmentLaw& law, std::int64_t radius);

enum class FamilyProfile { Qld, Homogeneous };

struct VelocityGridRow {
    double eps = 0.0;
    double lambda = 0.0;
    double v_hat = 0.0;
    double stderr_ = 0.0;
    double residual = 0.0;  // v_hat - lambda
    std::int64_t n_walks = 0;
    std::int64_t n_steps = 0;
};

struct ExponentFit {
    bool censored = true;  // all residuals statistically indistinguishable from 0
    double exponent = 0.0;
    double stderr_ = 0.0;
    std::int64_t used = 0;
};

struct ExpansionVsSimulation {
    std::vector<VelocityGridRow> rows;
    ExponentFit fit;
    std::string family;
};

// Velocity grid over eps with the residual-exponent fit restricted to
// residuals above 4 sigma; everything below is censored, not fitted.
ExpansionVsSimulation expansion_vs_simulation(FamilyProfile profile, int d,
                                              const std::vector<double>& eps_grid,
                                              std::int64_t n_steps, std::int64_t n_walks,
                                              std::uint64_t master_seed, int threads = 1);

}  // namespace rwre
