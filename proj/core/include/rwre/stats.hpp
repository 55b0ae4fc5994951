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

#include <cmath>
#include <cstdint>
#include <span>

namespace rwre {

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n = 0;
    double ci_level = 0.95;
};

// Neumaier-compensated accumulator; keeps 1e-9 identity targets honest when
// summing ~1e6 terms.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    void merge(const KahanSum& other) {
        add(other.sum);
        comp += other.comp;
    }
    double value() const { return sum + comp; }
};

inline MCEstimate mc_from_samples(std::span<const double> xs, double ci_level = 0.95) {
    MCEstimate e;
    e.n = static_cast<std::int64_t>(xs.size());
    e.ci_level = ci_level;
    if (xs.empty()) return e;
    KahanSum s;
    for (double x : xs) s.add(x);
    e.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        KahanSum q;
        for (double x : xs) {
            const double d = x - e.mean;
            q.add(d * d);
        }
        const double var = q.value() / static_cast<double>(xs.size() - 1);
        e.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return e;
}

struct WilsonInterval {
    double lower = 0.0;
    double upper = 1.0;
};

// Wilson score interval; behaves sensibly at p-hat near 0 or 1 where the
// normal interval collapses.
inline WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z = 3.0) {
    WilsonInterval w;
    if (n <= 0) return w;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    w.lower = center - half;
    w.upper = center + half;
    if (w.lower < 0.0) w.lower = 0.0;
    if (w.upper > 1.0) w.upper = 1.0;
    return w;
}

// Proportion estimate with Wilson-derived stderr (half-width at one sigma).
inline MCEstimate proportion_estimate(std::int64_t successes, std::int64_t n) {
    MCEstimate e;
    e.n = n;
    if (n <= 0) return e;
    e.mean = static_cast<double>(successes) / static_cast<double>(n);
    const WilsonInterval one_sigma = wilson_interval(successes, n, 1.0);
    e.stderr_ = 0.5 * (one_sigma.upper - one_sigma.lower);
    return e;
}

}  // namespace rwre
