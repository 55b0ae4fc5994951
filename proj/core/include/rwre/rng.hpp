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
#include <initializer_list>
#include <span>

namespace rwre {

// Counter-based randomness (Philox4x32-10, Salmon et al. 2011). Every draw is
// a pure function of (key, counter), so walks, environments and sites can be
// replayed independently of scheduling.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace detail {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * ctr[2];
    const std::array<std::uint32_t, 4> out = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0),
    };
    ctr = out;
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) detail::philox_round(ctr, key);
    return ctr;
}

// Collapses a list of 64-bit words into a single key with a splitmix chain.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
    return h;
}

inline double unit_from_u64(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// One-shot PRF: uniform in [0,1) keyed by `key` and an arbitrary word list
// (e.g. lattice coordinates). Distinct word lists give independent values.
inline double keyed_unit(std::uint64_t key, std::span<const std::int64_t> words) {
    std::uint64_t c0 = 0x452821e638d01377ULL;
    std::uint64_t c1 = 0xbe5466cf34e90c6cULL;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::uint64_t w = splitmix64(static_cast<std::uint64_t>(words[i]) + 0x9e3779b97f4a7c15ULL * (i + 1));
        if (i % 2 == 0) c0 ^= w; else c1 ^= w;
    }
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
         static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32)},
        {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return unit_from_u64(bits);
}

// Sequential stream of uniforms addressed by (key, draw index). Each Philox
// block yields two doubles; the counter advances deterministically.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    double next_unit() {
        if (phase_ == 0) {
            const auto out = philox4x32(
                {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                 0x243f6a88u, 0x85a308d3u},
                {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
            lo_ = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
            hi_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
            ++block_;
            phase_ = 1;
            return unit_from_u64(lo_);
        }
        phase_ = 0;
        return unit_from_u64(hi_);
    }

  private:
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::uint64_t lo_ = 0, hi_ = 0;
    int phase_ = 0;
};

}  // namespace rwre
