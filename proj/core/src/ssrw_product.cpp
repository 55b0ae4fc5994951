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

#include "rwre/ssrw_product.hpp"

#include <cmath>
#include <numbers>

#include "rwre/errors.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

// Gauss-Legendre 12 on [-1, 1].
constexpr double kGlX[6] = {0.125233408511469, 0.367831498998180, 0.587317954286617,
                            0.769902674194305, 0.904117256370475, 0.981560634246719};
constexpr double kGlW[6] = {0.249147045813403, 0.233492536538355, 0.203167426723066,
                            0.160078328543346, 0.106939325995318, 0.047175336386512};

void append_panel(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 5; i >= 0; --i) {
        nodes.push_back(mid - half * kGlX[i]);
        weights.push_back(half * kGlW[i]);
    }
    for (int i = 0; i < 6; ++i) {
        nodes.push_back(mid + half * kGlX[i]);
        weights.push_back(half * kGlW[i]);
    }
}

}  // namespace

ProductGreen::ProductGreen(int d, std::vector<Interval> axes, std::vector<std::int64_t> source,
                           double rel_tol)
    : d_(d), axes_(std::move(axes)), source_(std::move(source)) {
    if (static_cast<int>(axes_.size()) != d_ || static_cast<int>(source_.size()) != d_)
        throw config_error("product domain needs one interval and one source coordinate per axis");
    double lambda_min = 0.0;
    for (int j = 0; j < d_; ++j) {
        const auto& iv = axes_[static_cast<std::size_t>(j)];
        if (iv.hi < iv.lo) throw config_error("empty interval in product domain");
        if (source_[static_cast<std::size_t>(j)] < iv.lo || source_[static_cast<std::size_t>(j)] > iv.hi)
            throw config_error("source outside product domain");
        const double mj = static_cast<double>(iv.hi - iv.lo + 1);
        lambda_min += (1.0 - std::cos(std::numbers::pi / (mj + 1.0))) / d_;
    }
    (void)rel_tol;  // panel scheme already overshoots 1e-10; kept for the signature

    // Geometric panels [0, t0], [t0, r t0], ... out to the survival tail.
    const double t0 = 0.5;
    const double ratio = 1.35;
    const double t_max = (40.0 + d_ * std::numbers::ln2 + std::log(1.0 + 1.0 / lambda_min)) / lambda_min;
    append_panel(0.0, t0, nodes_, weights_);
    double left = t0;
    while (left < t_max) {
        const double right = std::min(left * ratio, t_max);
        append_panel(left, right, nodes_, weights_);
        left = right;
    }

    // Interval heat kernels in the discrete sine eigenbasis; identical axes
    // (same width and source offset) share one table.
    kernel_.resize(static_cast<std::size_t>(d_));
    row_sum_.resize(static_cast<std::size_t>(d_));
    const std::size_t n_nodes = nodes_.size();
    for (int j = 0; j < d_; ++j) {
        const std::size_t mj = m(j);
        const std::int64_t src = source_[static_cast<std::size_t>(j)] - axes_[static_cast<std::size_t>(j)].lo;
        bool shared = false;
        for (int i = 0; i < j; ++i) {
            if (m(i) == mj && source_[static_cast<std::size_t>(i)] - axes_[static_cast<std::size_t>(i)].lo == src) {
                kernel_[static_cast<std::size_t>(j)] = kernel_[static_cast<std::size_t>(i)];
                row_sum_[static_cast<std::size_t>(j)] = row_sum_[static_cast<std::size_t>(i)];
                shared = true;
                break;
            }
        }
        if (shared) continue;

        const double norm = 2.0 / (static_cast<double>(mj) + 1.0);
        std::vector<double> theta(mj), nu(mj), phi_src(mj);
        for (std::size_t q = 0; q < mj; ++q) {
            theta[q] = std::numbers::pi * static_cast<double>(q + 1) / (static_cast<double>(mj) + 1.0);
            nu[q] = (1.0 - std::cos(theta[q])) / d_;
            phi_src[q] = std::sin(theta[q] * static_cast<double>(src + 1));
        }
        auto& table = kernel_[static_cast<std::size_t>(j)];
        auto& rows = row_sum_[static_cast<std::size_t>(j)];
        table.assign(n_nodes * mj, 0.0);
        rows.assign(n_nodes, 0.0);
        std::vector<double> coeff(mj);
        for (std::size_t n = 0; n < n_nodes; ++n) {
            const double tau = nodes_[n];
            for (std::size_t q = 0; q < mj; ++q) coeff[q] = norm * phi_src[q] * std::exp(-nu[q] * tau);
            double* out = table.data() + n * mj;
            double row = 0.0;
            for (std::size_t i = 0; i < mj; ++i) {
                double s = 0.0;
                for (std::size_t q = 0; q < mj; ++q)
                    s += coeff[q] * std::sin(theta[q] * static_cast<double>(i + 1));
                out[i] = s;
                row += s;
            }
            rows[n] = row;
        }
    }
}

double ProductGreen::value(std::span<const std::int64_t> y) const {
    if (static_cast<int>(y.size()) != d_) throw config_error("point dimension mismatch");
    KahanSum acc;
    const std::size_t n_nodes = nodes_.size();
    for (std::size_t n = 0; n < n_nodes; ++n) {
        double prod = weights_[n];
        for (int j = 0; j < d_; ++j) {
            const std::size_t mj = m(j);
            const std::int64_t idx = y[static_cast<std::size_t>(j)] - axes_[static_cast<std::size_t>(j)].lo;
            if (idx < 0 || idx >= static_cast<std::int64_t>(mj)) return 0.0;
            prod *= kernel_[static_cast<std::size_t>(j)][n * mj + static_cast<std::size_t>(idx)];
        }
        acc.add(prod);
    }
    return acc.value();
}

double ProductGreen::occupation_total() const {
    KahanSum acc;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        double prod = weights_[n];
        for (int j = 0; j < d_; ++j) prod *= row_sum_[static_cast<std::size_t>(j)][n];
        acc.add(prod);
    }
    return acc.value();
}

double ProductGreen::power_sum(double p) const {
    const std::size_t n_nodes = nodes_.size();
    const std::size_t m1 = m(0);

    // axis-1 table laid out [y1][node], weights folded in
    std::vector<double> wk1(m1 * n_nodes);
    for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t n = 0; n < n_nodes; ++n)
            wk1[i * n_nodes + n] = weights_[n] * kernel_[0][n * m1 + i];

    if (d_ == 1) {
        KahanSum acc;
        for (std::size_t i = 0; i < m1; ++i) {
            double g = 0.0;
            for (std::size_t n = 0; n < n_nodes; ++n) g += wk1[i * n_nodes + n];
            if (g > 0.0) acc.add(std::pow(g, p));
        }
        return acc.value();
    }

    // transverse axes must be identical and symmetric around the source
    const std::size_t mt = m(1);
    if (mt % 2 == 0) throw config_error("power_sum needs odd transverse widths (symmetric caps)");
    const std::int64_t cap = static_cast<std::int64_t>(mt / 2);
    const std::size_t center = mt / 2;
    for (int j = 1; j < d_; ++j) {
        if (m(j) != mt || source_[static_cast<std::size_t>(j)] - axes_[static_cast<std::size_t>(j)].lo !=
                              static_cast<std::int64_t>(center))
            throw config_error("power_sum needs identical centered transverse axes");
    }
    // transverse table laid out [|v|][node]
    std::vector<double> tt(static_cast<std::size_t>(cap + 1) * n_nodes);
    for (std::int64_t v = 0; v <= cap; ++v)
        for (std::size_t n = 0; n < n_nodes; ++n)
            tt[static_cast<std::size_t>(v) * n_nodes + n] =
                kernel_[1][n * mt + center + static_cast<std::size_t>(v)];

    const int nt = d_ - 1;  // transverse axes
    double factorial = 1.0;
    for (int k = 2; k <= nt; ++k) factorial *= k;

    // enumerate sorted |v| tuples; multiplicity = permutations x sign flips
    std::vector<std::int64_t> tuple(static_cast<std::size_t>(nt), 0);
    std::vector<double> prod(n_nodes);
    KahanSum acc;

    auto flush_tuple = [&]() {
        double mult = factorial;
        int run = 1;
        int nonzero = 0;
        for (int k = 0; k < nt; ++k) {
            if (tuple[static_cast<std::size_t>(k)] != 0) ++nonzero;
            if (k > 0 && tuple[static_cast<std::size_t>(k)] == tuple[static_cast<std::size_t>(k - 1)]) {
                ++run;
                mult /= run;
            } else {
                run = 1;
            }
        }
        mult *= std::pow(2.0, nonzero);

        for (std::size_t n = 0; n < n_nodes; ++n) {
            double b = tt[static_cast<std::size_t>(tuple[0]) * n_nodes + n];
            for (int k = 1; k < nt; ++k)
                b *= tt[static_cast<std::size_t>(tuple[static_cast<std::size_t>(k)]) * n_nodes + n];
            prod[n] = b;
        }
        for (std::size_t i = 0; i < m1; ++i) {
            const double* row = wk1.data() + i * n_nodes;
            double g = 0.0;
            for (std::size_t n = 0; n < n_nodes; ++n) g += row[n] * prod[n];
            if (g > 0.0) acc.add(mult * std::pow(g, p));
        }
    };

    // odometer over nondecreasing tuples
    for (;;) {
        flush_tuple();
        int k = nt - 1;
        for (; k >= 0; --k) {
            if (tuple[static_cast<std::size_t>(k)] < cap) {
                const std::int64_t v = tuple[static_cast<std::size_t>(k)] + 1;
                for (int j = k; j < nt; ++j) tuple[static_cast<std::size_t>(j)] = v;
                break;
            }
        }
        if (k < 0) break;
    }
    return acc.value();
}

}  // namespace rwre
