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

#include "rwre/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

void check_dimension(int d) {
    if (d < 2 || d > kMaxDim) throw config_error("dimension must be in [2, " + std::to_string(kMaxDim) + "]");
}

std::int64_t axis_delta(const Point& p, const Point& center, int axis) {
    return p.c[static_cast<std::size_t>(axis)] - center.c[static_cast<std::size_t>(axis)];
}

// Rounded inner product for oblique slabs.
double oblique_ip(const Point& p, const Point& center, const std::vector<double>& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i)
        s += l[i] * static_cast<double>(p.c[i] - center.c[i]);
    return s;
}

}  // namespace

std::string side_name(Side s) {
    switch (s) {
        case Side::Frontal: return "frontal";
        case Side::Back: return "back";
        case Side::Lateral: return "lateral";
        case Side::Other: return "other";
    }
    return "other";
}

Domain Domain::slab(int d, Direction l, std::int64_t M, const Point& center, std::int64_t cap) {
    check_dimension(d);
    if (M < 1) throw config_error("slab halfwidth M must be >= 1");
    if (cap < 1) throw config_error("slab transverse cap must be >= 1");
    Domain dom;
    dom.d_ = d;
    dom.kind_ = Kind::Slab;
    dom.center_ = center;
    dom.M_ = M;
    dom.cap_ = cap;
    dom.axis_ = l.axis;
    dom.axis_sign_ = l.sign;
    return dom;
}

Domain Domain::oblique_slab(int d, std::vector<double> l, std::int64_t M, const Point& center,
                            std::int64_t window_cap) {
    check_dimension(d);
    if (M < 1) throw config_error("slab halfwidth M must be >= 1");
    if (window_cap < 1) throw config_error("slab window cap must be >= 1");
    if (static_cast<int>(l.size()) != d) throw config_error("direction vector size must equal d");
    double norm = 0.0;
    for (double v : l) norm += v * v;
    if (std::abs(norm - 1.0) > 1e-9) throw config_error("slab direction must be a unit vector");
    Domain dom;
    dom.d_ = d;
    dom.kind_ = Kind::ObliqueSlab;
    dom.center_ = center;
    dom.M_ = M;
    dom.cap_ = window_cap;
    dom.oblique_l_ = std::move(l);
    return dom;
}

Domain Domain::box(int d, std::int64_t M, const Point& center) {
    check_dimension(d);
    if (M < 1) throw config_error("box scale M must be >= 1");
    Domain dom;
    dom.d_ = d;
    dom.kind_ = Kind::Box;
    dom.center_ = center;
    dom.M_ = M;
    dom.cap_ = 25 * M * M * M;  // lateral threshold
    return dom;
}

Domain Domain::strip(int d, std::int64_t halfwidth, const Point& center, std::int64_t cap) {
    check_dimension(d);
    if (halfwidth < 1) throw config_error("strip halfwidth must be >= 1");
    if (cap < 1) throw config_error("strip transverse cap must be >= 1");
    Domain dom;
    dom.d_ = d;
    dom.kind_ = Kind::Strip;
    dom.center_ = center;
    dom.M_ = halfwidth;
    dom.cap_ = cap;
    return dom;
}

Domain Domain::explicit_sites(int d, std::vector<Point> sites) {
    check_dimension(d);
    Domain dom;
    dom.d_ = d;
    dom.kind_ = Kind::Explicit;
    if (!sites.empty()) dom.center_ = sites.front();
    dom.center_.d = d;
    dom.interior_ = std::move(sites);
    for (std::size_t i = 0; i < dom.interior_.size(); ++i) {
        if (dom.interior_[i].d != d) throw config_error("explicit domain site dimension mismatch");
        dom.interior_index_.emplace(dom.interior_[i], static_cast<std::int32_t>(i));
    }
    if (dom.interior_index_.size() != dom.interior_.size())
        throw config_error("explicit domain has duplicate sites");
    // boundary from adjacency
    for (const Point& p : dom.interior_) {
        for (int e = 0; e < direction_count(d); ++e) {
            const Point q = step(p, e);
            if (dom.interior_index_.count(q)) continue;
            if (dom.boundary_index_.count(q)) continue;
            dom.boundary_index_.emplace(q, static_cast<std::int32_t>(dom.boundary_.size()));
            dom.boundary_.push_back(q);
            dom.boundary_sides_.push_back(Side::Other);
        }
    }
    dom.materialized_ = true;
    return dom;
}

bool Domain::interior_contains(const Point& p) const {
    switch (kind_) {
        case Kind::Slab: {
            const std::int64_t t = axis_sign_ * axis_delta(p, center_, axis_);
            if (t < -M_ || t >= M_) return false;
            for (int i = 0; i < d_; ++i) {
                if (i == axis_) continue;
                const std::int64_t u = axis_delta(p, center_, i);
                if (u < -cap_ || u > cap_) return false;
            }
            return true;
        }
        case Kind::ObliqueSlab: {
            const double t = oblique_ip(p, center_, oblique_l_);
            if (!(t >= static_cast<double>(-M_) && t < static_cast<double>(M_))) return false;
            for (int i = 0; i < d_; ++i) {
                const std::int64_t u = axis_delta(p, center_, i);
                if (u < -cap_ || u > cap_) return false;
            }
            return true;
        }
        case Kind::Box: {
            const std::int64_t t = axis_delta(p, center_, 0);
            if (!(2 * t > -M_ && t < M_)) return false;
            for (int i = 1; i < d_; ++i) {
                const std::int64_t u = axis_delta(p, center_, i);
                if (u <= -cap_ || u >= cap_) return false;
            }
            return true;
        }
        case Kind::Strip: {
            const std::int64_t t = axis_delta(p, center_, 0);
            if (t <= -M_ || t >= M_) return false;
            for (int i = 1; i < d_; ++i) {
                const std::int64_t u = axis_delta(p, center_, i);
                if (u < -cap_ || u > cap_) return false;
            }
            return true;
        }
        case Kind::Explicit:
            return interior_index_.count(p) != 0;
    }
    return false;
}

Side Domain::classify_exit(const Point& p) const {
    switch (kind_) {
        case Kind::Slab: {
            const std::int64_t t = axis_sign_ * axis_delta(p, center_, axis_);
            if (t >= M_) return Side::Frontal;
            if (t < -M_) return Side::Back;
            return Side::Lateral;
        }
        case Kind::ObliqueSlab: {
            const double t = oblique_ip(p, center_, oblique_l_);
            if (t >= static_cast<double>(M_)) return Side::Frontal;
            if (t < static_cast<double>(-M_)) return Side::Back;
            return Side::Lateral;
        }
        case Kind::Box: {
            const std::int64_t t = axis_delta(p, center_, 0);
            if (t >= M_) return Side::Frontal;
            if (2 * t <= -M_) return Side::Back;
            for (int i = 1; i < d_; ++i) {
                if (std::abs(axis_delta(p, center_, i)) >= cap_) return Side::Lateral;
            }
            return Side::Other;
        }
        case Kind::Strip: {
            const std::int64_t t = axis_delta(p, center_, 0);
            if (t >= M_) return Side::Frontal;
            if (t <= -M_) return Side::Back;
            return Side::Lateral;
        }
        case Kind::Explicit: {
            const auto it = boundary_index_.find(p);
            if (it != boundary_index_.end()) return boundary_sides_[static_cast<std::size_t>(it->second)];
            return Side::Other;
        }
    }
    return Side::Other;
}

std::int64_t Domain::interior_size_bound() const {
    switch (kind_) {
        case Kind::Slab: {
            std::int64_t n = 2 * M_;
            for (int i = 1; i < d_; ++i) n *= (2 * cap_ + 1);
            return n;
        }
        case Kind::ObliqueSlab: {
            std::int64_t n = 1;
            for (int i = 0; i < d_; ++i) n *= (2 * cap_ + 1);
            return n;
        }
        case Kind::Box: {
            const std::int64_t e1_extent = (M_ - 1) - (-(M_ - 1) / 2) + 1;
            std::int64_t n = e1_extent;
            for (int i = 1; i < d_; ++i) n *= (2 * cap_ - 1);
            return n;
        }
        case Kind::Strip: {
            std::int64_t n = 2 * M_ - 1;
            for (int i = 1; i < d_; ++i) n *= (2 * cap_ + 1);
            return n;
        }
        case Kind::Explicit:
            return static_cast<std::int64_t>(interior_.size());
    }
    return 0;
}

void Domain::enumerate_interior(std::vector<Point>& out) const {
    // Lexicographic sweep over the bounding window keeps ordering stable.
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    for (int i = 0; i < d_; ++i) {
        lo[static_cast<std::size_t>(i)] = -cap_;
        hi[static_cast<std::size_t>(i)] = cap_;
    }
    switch (kind_) {
        case Kind::Slab:
            lo[static_cast<std::size_t>(axis_)] = (axis_sign_ > 0) ? -M_ : -(M_ - 1);
            hi[static_cast<std::size_t>(axis_)] = (axis_sign_ > 0) ? M_ - 1 : M_;
            break;
        case Kind::Box:
            lo[0] = -(M_ - 1) / 2;
            hi[0] = M_ - 1;
            for (int i = 1; i < d_; ++i) {
                lo[static_cast<std::size_t>(i)] = -(cap_ - 1);
                hi[static_cast<std::size_t>(i)] = cap_ - 1;
            }
            break;
        case Kind::Strip:
            lo[0] = -(M_ - 1);
            hi[0] = M_ - 1;
            break;
        case Kind::ObliqueSlab:
            break;
        case Kind::Explicit:
            out = interior_;
            return;
    }
    Point p = Point::zero(d_);
    std::array<std::int64_t, kMaxDim> cur{};
    for (int i = 0; i < d_; ++i) cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
    for (;;) {
        for (int i = 0; i < d_; ++i)
            p.c[static_cast<std::size_t>(i)] = center_.c[static_cast<std::size_t>(i)] + cur[static_cast<std::size_t>(i)];
        if (interior_contains(p)) out.push_back(p);
        int i = d_ - 1;
        for (; i >= 0; --i) {
            if (++cur[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]) break;
            cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        }
        if (i < 0) break;
    }
}

void Domain::materialize(std::int64_t site_budget) const {
    if (materialized_) return;
    const std::int64_t bound = interior_size_bound();
    if (bound > site_budget)
        throw budget_error("domain needs up to " + std::to_string(bound) + " sites, budget is " +
                           std::to_string(site_budget));
    std::vector<Point> sites;
    sites.reserve(static_cast<std::size_t>(bound));
    enumerate_interior(sites);
    interior_ = std::move(sites);
    interior_index_.reserve(interior_.size() * 2);
    for (std::size_t i = 0; i < interior_.size(); ++i)
        interior_index_.emplace(interior_[i], static_cast<std::int32_t>(i));
    for (const Point& p : interior_) {
        for (int e = 0; e < direction_count(d_); ++e) {
            const Point q = step(p, e);
            if (interior_index_.count(q)) continue;
            if (boundary_index_.count(q)) continue;
            boundary_index_.emplace(q, static_cast<std::int32_t>(boundary_.size()));
            boundary_.push_back(q);
            boundary_sides_.push_back(classify_exit(q));
        }
    }
    materialized_ = true;
}

std::int32_t Domain::interior_index(const Point& p) const {
    const auto it = interior_index_.find(p);
    return it == interior_index_.end() ? -1 : it->second;
}

std::int32_t Domain::boundary_index(const Point& p) const {
    const auto it = boundary_index_.find(p);
    return it == boundary_index_.end() ? -1 : it->second;
}

Domain make_slab(int d, Direction l, std::int64_t M, const Point& center, std::int64_t transverse_cap) {
    return Domain::slab(d, l, M, center, transverse_cap);
}

Domain make_box(int d, std::int64_t M, const Point& center, std::optional<std::int64_t> materialize_budget) {
    Domain dom = Domain::box(d, M, center);
    if (materialize_budget) dom.materialize(*materialize_budget);
    return dom;
}

MiddleFrontal middle_frontal(int d, std::int64_t M, const Point& center) {
    check_dimension(d);
    if (M < 2 || M % 2 != 0) throw config_error("middle-frontal part requires even M >= 2");
    const std::int64_t m3 = M * M * M;
    std::vector<Point> sites;
    std::vector<Point> back;
    Point p = Point::zero(d);
    // e1 in [M/2, M), transverse in (-M^3, M^3)
    std::array<std::int64_t, kMaxDim> cur{};
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    lo[0] = M / 2;
    hi[0] = M - 1;
    for (int i = 1; i < d; ++i) {
        lo[static_cast<std::size_t>(i)] = -(m3 - 1);
        hi[static_cast<std::size_t>(i)] = m3 - 1;
    }
    for (int i = 0; i < d; ++i) cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
    for (;;) {
        for (int i = 0; i < d; ++i)
            p.c[static_cast<std::size_t>(i)] = center.c[static_cast<std::size_t>(i)] + cur[static_cast<std::size_t>(i)];
        sites.push_back(p);
        if (cur[0] == M / 2) back.push_back(p);
        int i = d - 1;
        for (; i >= 0; --i) {
            if (++cur[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]) break;
            cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        }
        if (i < 0) break;
    }
    MiddleFrontal out{Domain::explicit_sites(d, std::move(sites)), std::move(back)};
    return out;
}

bool middle_frontal_contains(int d, std::int64_t M, const Point& center, const Point& y) {
    check_dimension(d);
    const std::int64_t t = y.c[0] - center.c[0];
    if (!(2 * t >= M && t < M)) return false;
    const std::int64_t m3 = M * M * M;
    for (int i = 1; i < d; ++i) {
        if (std::abs(y.c[static_cast<std::size_t>(i)] - center.c[static_cast<std::size_t>(i)]) >= m3) return false;
    }
    return true;
}

CellIndex partition_index(const LevelGeometry& g, const Point& x) {
    if (g.n_prime < 1 || g.n < 1) throw config_error("level geometry requires N'_k >= 1 and N_k >= 1");
    if (g.n > 2'000'000) throw config_error("N_k too large for 64-bit transverse pitch");
    const std::int64_t pitch = 2 * g.n * g.n * g.n - 1;
    CellIndex z;
    z.d = x.d;
    z.z[0] = floor_div(x.c[0], g.n_prime);
    for (int i = 1; i < x.d; ++i) z.z[static_cast<std::size_t>(i)] = floor_div(x.c[static_cast<std::size_t>(i)], pitch);
    return z;
}

Point box_anchor_of_cell(const LevelGeometry& g, const CellIndex& z) {
    const std::int64_t pitch = 2 * g.n * g.n * g.n - 1;
    Point anchor = Point::zero(z.d);
    // cell e1 range [z1 N', (z1+1) N'), box middle-frontal range [A1 + N - N', A1 + N)
    anchor.c[0] = (z.z[0] + 1) * g.n_prime - g.n;
    // cell transverse range [z_i p, (z_i +1) p), box transverse (A_i - N^3, A_i + N^3), width p
    for (int i = 1; i < z.d; ++i)
        anchor.c[static_cast<std::size_t>(i)] = z.z[static_cast<std::size_t>(i)] * pitch + g.n * g.n * g.n - 1;
    return anchor;
}

}  // namespace rwre
