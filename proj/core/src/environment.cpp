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

#include "rwre/environment.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

void ProbVector::validate() const {
    double sum = 0.0;
    for (int e = 0; e < direction_count(d); ++e) {
        const double x = w[static_cast<std::size_t>(e)];
        if (x < 0.0) throw config_error("probability vector has a negative weight");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) throw config_error("probability vector does not sum to 1");
}

ProbVector ProbVector::uniform(int d) {
    ProbVector p;
    p.d = d;
    for (int e = 0; e < direction_count(d); ++e) p.w[static_cast<std::size_t>(e)] = 1.0 / (2.0 * d);
    return p;
}

void Perturbation::validate() const {
    double sum = 0.0;
    const double bound = 1.0 / (4.0 * d) + 1e-15;
    for (int e = 0; e < direction_count(d); ++e) {
        const double x = xi[static_cast<std::size_t>(e)];
        if (std::abs(x) > bound) throw config_error("perturbation exceeds the 1/(4d) band");
        sum += x;
    }
    if (std::abs(sum) > kSimplexTol) throw config_error("perturbation does not sum to 0");
}

DriftVector local_drift(const ProbVector& p) {
    DriftVector v;
    v.d = p.d;
    for (int a = 0; a < p.d; ++a) {
        v.v[static_cast<std::size_t>(a)] =
            p.w[static_cast<std::size_t>(2 * a)] - p.w[static_cast<std::size_t>(2 * a + 1)];
    }
    return v;
}

double drift_exponent_alpha(int d) {
    if (d == 2) return 2.0;
    if (d == 3) return 2.5;
    return 3.0;
}

EnvironmentLaw EnvironmentLaw::ssrw(int d, std::uint64_t master_seed) {
    Perturbation zero;
    zero.d = d;
    return from_support(d, 0.5, {SupportAtom{zero, 1.0}}, master_seed);
}

EnvironmentLaw EnvironmentLaw::two_point(int d, double epsilon, double lambda_target,
                                         double transverse_noise, std::uint64_t master_seed) {
    if (d < 2 || d > kMaxDim) throw config_error("dimension out of range");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must be in (0,1)");
    const double ceiling = epsilon / (2.0 * d);
    if (lambda_target < 0.0 || lambda_target > ceiling + 1e-15) {
        std::ostringstream os;
        os << "lambda_target " << lambda_target << " is infeasible: the Omega_eps band |w - 1/(2d)| <= eps/(4d) "
           << "caps the axial drift at eps/(2d) = " << ceiling;
        throw config_error(os.str());
    }
    if (transverse_noise < 0.0 || transverse_noise > 1.0 / (4.0 * d) + 1e-15)
        throw config_error("transverse noise must lie in [0, 1/(4d)]");

    const double a = 1.0 / (4.0 * d);
    // E(xi(e1) - xi(-e1)) = 2a(2q-1); q = 1/2 + d*lambda/eps hits lambda exactly.
    const double two_q_minus_one = 2.0 * d * lambda_target / epsilon;
    const double q = 0.5 + 0.5 * two_q_minus_one;

    auto atom = [&](double axial, double noise) {
        Perturbation x;
        x.d = d;
        x.xi[0] = axial;
        x.xi[1] = -axial;
        for (int axis = 1; axis < d; ++axis) {
            x.xi[static_cast<std::size_t>(2 * axis)] = noise;
            x.xi[static_cast<std::size_t>(2 * axis + 1)] = -noise;
        }
        return x;
    };

    std::vector<SupportAtom> support;
    if (lambda_target == 0.0 && transverse_noise == 0.0) {
        support.push_back({atom(0.0, 0.0), 1.0});  // the deterministic SSRW law
    } else if (transverse_noise == 0.0 && q >= 1.0 - 1e-15) {
        support.push_back({atom(+a, 0.0), 1.0});  // ceiling drift: homogeneous law
    } else if (transverse_noise == 0.0) {
        support.push_back({atom(+a, 0.0), q});
        support.push_back({atom(-a, 0.0), 1.0 - q});
    } else {
        // independent fair flip of the transverse tilt keeps it zero-mean
        support.push_back({atom(+a, +transverse_noise), q / 2.0});
        support.push_back({atom(+a, -transverse_noise), q / 2.0});
        support.push_back({atom(-a, +transverse_noise), (1.0 - q) / 2.0});
        support.push_back({atom(-a, -transverse_noise), (1.0 - q) / 2.0});
    }
    return from_support(d, epsilon, std::move(support), master_seed);
}

EnvironmentLaw EnvironmentLaw::from_support(int d, double epsilon, std::vector<SupportAtom> support,
                                            std::uint64_t master_seed) {
    if (d < 2 || d > kMaxDim) throw config_error("dimension out of range");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must be in (0,1)");
    if (support.empty()) throw config_error("law support must be nonempty");
    EnvironmentLaw law;
    law.d_ = d;
    law.eps_ = epsilon;
    law.seed_ = master_seed;
    law.support_ = std::move(support);
    law.finalize();
    return law;
}

void EnvironmentLaw::finalize() {
    double psum = 0.0;
    cdf_.clear();
    atom_vectors_.clear();
    const double band = eps_ / (4.0 * d_) + 1e-15;
    for (const SupportAtom& atom : support_) {
        if (atom.xi.d != d_) throw config_error("support atom dimension mismatch");
        atom.xi.validate();
        if (atom.prob < 0.0) throw config_error("support probabilities must be nonnegative");
        psum += atom.prob;
        cdf_.push_back(psum);
        ProbVector v;
        v.d = d_;
        for (int e = 0; e < direction_count(d_); ++e) {
            const double w = 1.0 / (2.0 * d_) + eps_ * atom.xi.xi[static_cast<std::size_t>(e)];
            if (std::abs(w - 1.0 / (2.0 * d_)) > band)
                throw config_error("support atom leaves Omega_eps");
            v.w[static_cast<std::size_t>(e)] = w;
        }
        v.validate();
        atom_vectors_.push_back(v);
    }
    if (std::abs(psum - 1.0) > kSimplexTol) throw config_error("support probabilities must sum to 1");
    cdf_.back() = 1.0;  // guard against rounding in the final bin
    site_key_ = derive_key({seed_, 0x5349544553414d50ULL});
}

double EnvironmentLaw::lambda() const { return mean_drift().e1(); }

DriftVector EnvironmentLaw::mean_drift() const {
    DriftVector v;
    v.d = d_;
    for (int a = 0; a < d_; ++a) {
        double m = 0.0;
        for (const SupportAtom& atom : support_) {
            m += atom.prob *
                 (atom.xi.xi[static_cast<std::size_t>(2 * a)] - atom.xi.xi[static_cast<std::size_t>(2 * a + 1)]);
        }
        v.v[static_cast<std::size_t>(a)] = eps_ * m;
    }
    return v;
}

ConditionReport EnvironmentLaw::check_condition(DriftCondition kind, double eta) const {
    ConditionReport r;
    r.omega_member = true;  // enforced at construction
    r.lambda = lambda();
    if (kind == DriftCondition::Quadratic) {
        r.kind = "qld";
        r.threshold = eps_ * eps_;
    } else {
        if (!(eta > 0.0 && eta < 1.0)) throw config_error("LD condition requires eta in (0,1)");
        r.kind = "ld";
        r.threshold = std::pow(eps_, drift_exponent_alpha(d_) - eta);
    }
    // boundary instances (lambda constructed to equal the threshold) must not
    // fail to double rounding
    const double slack = 1e-12 * std::max(1.0, std::abs(r.threshold));
    r.holds = r.omega_member && r.lambda >= r.threshold - slack;
    return r;
}

int EnvironmentLaw::site_atom(std::uint64_t env_id, const Point& site) const {
    if (support_.size() == 1) return 0;
    std::array<std::int64_t, kMaxDim + 1> words;
    words[0] = static_cast<std::int64_t>(env_id);
    for (int i = 0; i < d_; ++i) words[static_cast<std::size_t>(i + 1)] = site.c[static_cast<std::size_t>(i)];
    const double u = keyed_unit(site_key_, std::span<const std::int64_t>(words.data(), static_cast<std::size_t>(d_ + 1)));
    // cdf_ is tiny (2 or 4 atoms in practice); linear scan
    for (std::size_t k = 0; k + 1 < cdf_.size(); ++k) {
        if (u < cdf_[k]) return static_cast<int>(k);
    }
    return static_cast<int>(cdf_.size() - 1);
}

nlohmann::json EnvironmentLaw::to_json() const {
    nlohmann::json j;
    j["schema"] = "rwre-law-v1";
    j["d"] = d_;
    j["epsilon"] = eps_;
    j["master_seed"] = seed_;
    nlohmann::json atoms = nlohmann::json::array();
    for (const SupportAtom& atom : support_) {
        nlohmann::json a;
        a["prob"] = atom.prob;
        std::vector<double> xi(atom.xi.xi.begin(), atom.xi.xi.begin() + direction_count(d_));
        a["xi"] = xi;
        atoms.push_back(a);
    }
    j["support"] = atoms;
    return j;
}

EnvironmentLaw EnvironmentLaw::from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j.at("schema").get<std::string>() != "rwre-law-v1")
        throw config_error("unknown law schema");
    const int d = j.at("d").get<int>();
    const double eps = j.at("epsilon").get<double>();
    const std::uint64_t seed = j.at("master_seed").get<std::uint64_t>();
    std::vector<SupportAtom> support;
    for (const auto& a : j.at("support")) {
        SupportAtom atom;
        atom.prob = a.at("prob").get<double>();
        const auto xi = a.at("xi").get<std::vector<double>>();
        if (static_cast<int>(xi.size()) != direction_count(d))
            throw config_error("law support atom has wrong xi size");
        atom.xi.d = d;
        for (std::size_t e = 0; e < xi.size(); ++e) atom.xi.xi[e] = xi[e];
        support.push_back(atom);
    }
    return from_support(d, eps, std::move(support), seed);
}

const ProbVector& TableEnvironment::site(const Point& p) const {
    const auto it = table_.find(p);
    if (it == table_.end()) throw config_error("table environment has no vector at the requested site");
    return it->second;
}

}  // namespace rwre
