#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace blowup {

// Static block split of [0, n) over up to `threads` workers (0 = hardware).
// Work items must be independent; results are deterministic regardless of
// the thread count because each index is computed exactly once.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned t = threads > 0 ? static_cast<unsigned>(threads) : (hw ? hw : 1u);
    if (t <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    t = std::min<std::size_t>(t, n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += t) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace blowup
