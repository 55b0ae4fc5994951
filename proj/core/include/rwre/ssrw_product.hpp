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
#include <span>
#include <vector>

namespace rwre {

// Killed SSRW Green's function on a product of intervals.
//
// In continuous time (rate-1 jumps, each axis moving at rate 1/d) the d
// coordinates are independent one-dimensional walks, and the Green's function
// of the discrete chain equals the continuous-time occupation density:
// (I - P)^{-1} = (-Q)^{-1}. Killing on a product of intervals factorizes the
// heat kernel, so
//
//   g(x, y) = Int_0^inf  prod_j K_j(tau; x_j -> y_j)  dtau,
//
// with K_j an interval heat kernel with Dirichlet ends, available in the
// discrete sine eigenbasis. The integral is evaluated by composite
// Gauss-Legendre on geometric panels; node tables are shared across sites, so
// huge domains (e.g. d = 5 slabs) can be streamed without materializing rows.
class ProductGreen {
  public:
    struct Interval {
        std::int64_t lo = 0;  // inclusive, absolute coordinates
        std::int64_t hi = 0;
    };

    ProductGreen(int d, std::vector<Interval> axes, std::vector<std::int64_t> source,
                 double rel_tol = 1e-10);

    // g(source -> y); y in absolute coordinates, inside the product domain.
    double value(std::span<const std::int64_t> y) const;

    // sum_y g(source, y) over the whole domain = E_source(T).
    double occupation_total() const;

    // sum_y g(source, y)^p streamed over the domain. Requires all transverse
    // axes (j >= 1) to be symmetric around the source coordinate and of equal
    // width, which holds for the slabs and strips used here.
    double power_sum(double p) const;

    int node_count() const { return static_cast<int>(weights_.size()); }

  private:
    int d_;
    std::vector<Interval> axes_;
    std::vector<std::int64_t> source_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    // kernel_[j][n * m_j + i] = K_j(tau_n; source_j -> lo_j + i)
    std::vector<std::vector<double>> kernel_;
    // row_sum_[j][n] = sum_i K_j(tau_n; source_j -> lo_j + i)
    std::vector<std::vector<double>> row_sum_;

    std::size_t m(int axis) const {
        return static_cast<std::size_t>(axes_[static_cast<std::size_t>(axis)].hi -
                                        axes_[static_cast<std::size_t>(axis)].lo + 1);
    }
};

}  // namespace rwre
