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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

inline constexpr int kMaxDim = 8;

// Lattice site in Z^d, d in [2, kMaxDim]. Unused coordinates stay zero so
// equality and hashing can look at the whole array.
struct Point {
    std::array<std::int64_t, kMaxDim> c{};
    int d = 0;

    static Point zero(int d) {
        Point p;
        p.d = d;
        return p;
    }
    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    bool operator==(const Point& o) const { return d == o.d && c == o.c; }
};

inline Point make_point(std::initializer_list<std::int64_t> coords) {
    Point p;
    p.d = static_cast<int>(coords.size());
    int i = 0;
    for (auto v : coords) p.c[static_cast<std::size_t>(i++)] = v;
    return p;
}

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.d);
        for (int i = 0; i < p.d; ++i) h = splitmix64(h ^ static_cast<std::uint64_t>(p.c[static_cast<std::size_t>(i)]));
        return static_cast<std::size_t>(h);
    }
};

// One of the 2d canonical unit vectors. Index convention: 2*axis for +e_{axis+1},
// 2*axis+1 for -e_{axis+1}.
struct Direction {
    int axis = 0;  // 0-based
    int sign = 1;  // +1 or -1
};

inline constexpr int direction_count(int d) { return 2 * d; }
inline Direction direction_from_index(int idx) { return Direction{idx / 2, (idx % 2 == 0) ? 1 : -1}; }
inline int direction_index(const Direction& e) { return 2 * e.axis + (e.sign > 0 ? 0 : 1); }
inline int opposite_index(int idx) { return idx ^ 1; }

inline Point step(const Point& p, int dir_idx) {
    Point q = p;
    const Direction e = direction_from_index(dir_idx);
    q.c[static_cast<std::size_t>(e.axis)] += e.sign;
    return q;
}

// Exact floor division for negative-coordinate cell indexing.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

enum class Side { Frontal, Back, Lateral, Other };

std::string side_name(Side s);

// Finite subset of Z^d with a boundary classified by sides. Slab, box and
// strip domains carry O(1) geometric predicates; materialization (site lists
// and index maps, needed for linear solves) is on demand and budget-guarded.
// Geometric predicates are always safe to share across threads; materialize()
// must complete before a domain is shared.
class Domain {
  public:
    enum class Kind { Slab, ObliqueSlab, Box, Strip, Explicit };

    // U_{l,M}(x): -M <= (y-x).l < M for an axis direction l, with transverse
    // coordinates materialized within +-cap. Frontal: (y-x).l >= M,
    // Back: (y-x).l < -M, Lateral: transverse cap.
    static Domain slab(int d, Direction l, std::int64_t M, const Point& center, std::int64_t transverse_cap);

    // Same slab for an arbitrary unit vector l; inner products are real and
    // all coordinates are windowed by the cap.
    static Domain oblique_slab(int d, std::vector<double> l, std::int64_t M, const Point& center,
                               std::int64_t window_cap);

    // B_M(x): -M/2 < (y-x).e1 < M and |(y-x).e_i| < 25 M^3. Frontal boundary
    // (y-x).e1 >= M, Back 2(y-x).e1 <= -M, Lateral |(y-x).e_i| >= 25 M^3; at
    // overlapping corners precedence is Frontal > Back > Lateral.
    static Domain box(int d, std::int64_t M, const Point& center);

    // Symmetric strip |(y-x).e1| <= halfwidth-1 with absorbing hyperplanes at
    // +-halfwidth (Frontal/Back) and transverse cap (Lateral). This is the
    // domain whose absorption solve gives P(T_{+L} < T_{-L}).
    static Domain strip(int d, std::int64_t halfwidth, const Point& center, std::int64_t transverse_cap);

    static Domain explicit_sites(int d, std::vector<Point> sites);

    int dimension() const { return d_; }
    Kind kind() const { return kind_; }
    const Point& center() const { return center_; }
    std::int64_t scale() const { return M_; }
    // Transverse cap for slabs/strips; lateral threshold (25 M^3) for boxes.
    std::int64_t cap_param() const { return cap_; }
    int slab_axis() const { return axis_; }
    int slab_sign() const { return axis_sign_; }

    bool interior_contains(const Point& p) const;
    // Classifies a non-interior point by the defining inequalities.
    Side classify_exit(const Point& p) const;
    // True when Lateral means "hit the artificial transverse cap" rather than
    // a genuine lateral side (slabs and strips).
    bool lateral_is_cap() const { return kind_ == Kind::Slab || kind_ == Kind::ObliqueSlab || kind_ == Kind::Strip; }

    // Number of interior sites, computable without enumeration.
    std::int64_t interior_size_bound() const;

    void materialize(std::int64_t site_budget) const;
    bool materialized() const { return materialized_; }
    std::span<const Point> interior() const { return interior_; }
    std::span<const Point> boundary() const { return boundary_; }
    std::span<const Side> boundary_sides() const { return boundary_sides_; }
    // -1 when absent.
    std::int32_t interior_index(const Point& p) const;
    std::int32_t boundary_index(const Point& p) const;

  private:
    int d_ = 0;
    Kind kind_ = Kind::Explicit;
    Point center_{};
    std::int64_t M_ = 0;
    std::int64_t cap_ = 0;
    int axis_ = 0;
    int axis_sign_ = 1;
    std::vector<double> oblique_l_;

    mutable bool materialized_ = false;
    mutable std::vector<Point> interior_;
    mutable std::vector<Point> boundary_;
    mutable std::vector<Side> boundary_sides_;
    mutable std::unordered_map<Point, std::int32_t, PointHash> interior_index_;
    mutable std::unordered_map<Point, std::int32_t, PointHash> boundary_index_;

    void enumerate_interior(std::vector<Point>& out) const;
    friend struct MiddleFrontal;
};

Domain make_slab(int d, Direction l, std::int64_t M, const Point& center, std::int64_t transverse_cap);
Domain make_box(int d, std::int64_t M, const Point& center,
                std::optional<std::int64_t> materialize_budget = std::nullopt);

// B*_M(x) with its back side {(y-x).e1 = M/2}. M must be even.
struct MiddleFrontal {
    Domain part;
    std::vector<Point> back_side;
};
MiddleFrontal middle_frontal(int d, std::int64_t M, const Point& center);

// Membership tests for B*_M(x) without materialization.
bool middle_frontal_contains(int d, std::int64_t M, const Point& center, const Point& y);

struct CellIndex {
    std::array<std::int64_t, kMaxDim> z{};
    int d = 0;
    bool operator==(const CellIndex& o) const { return d == o.d && z == o.z; }
};

// Level-k partition geometry: e1 pitch N'_k, transverse pitch 2 N_k^3 - 1.
struct LevelGeometry {
    std::int64_t n_prime = 1;  // N'_k
    std::int64_t n = 1;        // N_k
};

CellIndex partition_index(const LevelGeometry& g, const Point& x);

// Anchor of the level-k box whose middle-frontal part is the cell z.
Point box_anchor_of_cell(const LevelGeometry& g, const CellIndex& z);

}  // namespace rwre
