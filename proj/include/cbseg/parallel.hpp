#pragma once

#include <thread>
#include <vector>

namespace cbseg {

inline int resolve_thread_count(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static row partition: each worker owns a contiguous [y0, y1) block, so
// writes to per-row output stay disjoint and results are thread-count
// independent.
template <typename Fn>
void parallel_rows(int height, int threads, Fn&& fn) {
    threads = resolve_thread_count(threads);
    if (threads <= 1 || height <= 1) {
        fn(0, height);
        return;
    }
    if (threads > height)
        threads = height;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads) - 1);
    const int chunk = (height + threads - 1) / threads;
    for (int w = 1; w < threads; ++w) {
        const int y0 = w * chunk;
        const int y1 = std::min(height, y0 + chunk);
        if (y0 >= y1)
            break;
        pool.emplace_back([&fn, y0, y1] { fn(y0, y1); });
    }
    fn(0, std::min(height, chunk));
    for (auto& t : pool)
        t.join();
}

} // namespace cbseg
