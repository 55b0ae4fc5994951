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

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace rwre {

// Deterministic work partitioning: indices [0, n) are processed in fixed
// chunks pulled from an atomic cursor. Results must be written to
// index-addressed slots so the thread count never changes the output.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (n + 8 * threads - 1) / (8 * threads) > 0
                                   ? (n + 8 * threads - 1) / (8 * threads)
                                   : 1;
    std::atomic<std::int64_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t begin = cursor.fetch_add(chunk);
            if (begin >= n) return;
            const std::int64_t end = begin + chunk < n ? begin + chunk : n;
            for (std::int64_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace rwre
