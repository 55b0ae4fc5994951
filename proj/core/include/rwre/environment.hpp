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
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rwre/lattice.hpp"

namespace rwre {

inline constexpr double kSimplexTol = 1e-12;

// Probability vector on the 2d canonical directions.
struct ProbVector {
    int d = 0;
    std::array<double, 2 * kMaxDim> w{};

    double weight(int dir_idx) const { return w[static_cast<std::size_t>(dir_idx)]; }
    void validate() const;  // sum 1 within kSimplexTol, all weights >= 0
    static ProbVector uniform(int d);
};

// Zero-sum site perturbation xi with |xi(e)| <= 1/(4d); the induced kernel is
// w(e) = 1/(2d) + eps * xi(e).
struct Perturbation {
    int d = 0;
    std::array<double, 2 * kMaxDim> xi{};

    void validate() const;
};

struct DriftVector {
    int d = 0;
    std::array<double, kMaxDim> v{};
    double e1() const { return v[0]; }
};

DriftVector local_drift(const ProbVector& p);

struct SupportAtom {
    Perturbation xi;
    double prob = 0.0;
};

enum class DriftCondition { Quadratic, LinearEta };

struct ConditionReport {
    bool holds = false;
    bool omega_member = false;
    double lambda = 0.0;
    double threshold = 0.0;
    std::string kind;
};

// alpha(d): 2 for d=2, 2.5 for d=3, 3 for d>=4.
double drift_exponent_alpha(int d);

// i.i.d. product law on site kernels, supported on finitely many perturbation
// atoms inside Omega_eps. Site vectors are never stored: they are recomputed
// from a keyed counter-based generator, so revisits and parallel replay see
// identical environments.
class EnvironmentLaw {
  public:
    static EnvironmentLaw ssrw(int d, std::uint64_t master_seed);

    // Two-point mixture on the e1 axis hitting E(drift).e1 = lambda_target
    // exactly, plus an optional symmetric transverse noise flip. Throws
    // config_error when lambda_target exceeds the Omega_eps drift ceiling
    // eps/(2d).
    static EnvironmentLaw two_point(int d, double epsilon, double lambda_target,
                                    double transverse_noise, std::uint64_t master_seed);

    static EnvironmentLaw from_support(int d, double epsilon, std::vector<SupportAtom> support,
                                       std::uint64_t master_seed);

    int dimension() const { return d_; }
    double epsilon() const { return eps_; }
    std::uint64_t master_seed() const { return seed_; }
    const std::vector<SupportAtom>& support() const { return support_; }
    const std::vector<ProbVector>& atom_vectors() const { return atom_vectors_; }

    // lambda = E(d(0)).e1, exact over the finite support.
    double lambda() const;
    DriftVector mean_drift() const;

    ConditionReport check_condition(DriftCondition kind, double eta = 0.0) const;

    // Deterministic i.i.d. site sampling: atom index as a pure function of
    // (master_seed, env_id, site).
    int site_atom(std::uint64_t env_id, const Point& site) const;
    const ProbVector& site_vector(std::uint64_t env_id, const Point& site) const {
        return atom_vectors_[static_cast<std::size_t>(site_atom(env_id, site))];
    }

    nlohmann::json to_json() const;
    static EnvironmentLaw from_json(const nlohmann::json& j);

  private:
    int d_ = 0;
    double eps_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<SupportAtom> support_;
    std::vector<double> cdf_;
    std::vector<ProbVector> atom_vectors_;
    std::uint64_t site_key_ = 0;

    void finalize();  // validates Omega_eps membership and builds tables
};

// Quenched view: one sampled environment (law, env_id).
struct SampledEnvironment {
    const EnvironmentLaw* law = nullptr;
    std::uint64_t env_id = 0;

    int dimension() const { return law->dimension(); }
    const ProbVector& site(const Point& p) const { return law->site_vector(env_id, p); }
};

// Explicit site table, used for exact enumerations on small domains.
class TableEnvironment {
  public:
    explicit TableEnvironment(int d) : d_(d) {}
    int dimension() const { return d_; }
    void set(const Point& p, const ProbVector& v) { table_[p] = v; }
    const ProbVector& site(const Point& p) const;

  private:
    int d_;
    std::unordered_map<Point, ProbVector, PointHash> table_;
};

using WalkEnvironment = std::variant<SampledEnvironment, const TableEnvironment*>;

}  // namespace rwre
