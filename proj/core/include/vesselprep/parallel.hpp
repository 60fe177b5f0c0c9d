#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace vesselprep {

/// Resolves a thread-count request: 0 means "auto" (hardware concurrency).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [begin, end) into contiguous chunks, one per worker. Each index is
/// processed by exactly one worker with the same per-index code path, so
/// results are bitwise identical for any thread count. `fn(i0, i1)` receives
/// a half-open subrange.
template <typename Fn>
void parallel_chunks(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
    const std::int64_t n = end - begin;
    if (n <= 0) return;
    int t = resolve_threads(threads);
    if (static_cast<std::int64_t>(t) > n) t = static_cast<int>(n);
    if (t <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t - 1));
    const std::int64_t chunk = (n + t - 1) / t;
    for (int w = 1; w < t; ++w) {
        const std::int64_t i0 = begin + chunk * w;
        const std::int64_t i1 = std::min(end, i0 + chunk);
        if (i0 >= i1) break;
        pool.emplace_back([&fn, i0, i1] { fn(i0, i1); });
    }
    fn(begin, std::min(end, begin + chunk));
    for (auto& th : pool) th.join();
}

}  // namespace vesselprep
