#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sitemap {

inline unsigned effective_threads(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Static chunked split of [0, n). fn(begin, end) must not touch another
// chunk's slots; callers get determinism by indexing results, not by order.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    threads = effective_threads(threads);
    if (threads <= 1 || n < 2) {
        if (n > 0) fn(0, n);
        return;
    }
    if (threads > n) threads = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 1; t < threads; ++t) {
        std::size_t b = t * chunk;
        if (b >= n) break;
        std::size_t e = std::min(n, b + chunk);
        pool.emplace_back(fn, b, e);
    }
    fn(0, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

} // namespace sitemap
