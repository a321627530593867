#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace multisle {

// Runs fn(0..n-1) on up to `threads` workers.  Tasks must be independent;
// callers collect results into pre-sized storage indexed by the task id, so
// output order does not depend on scheduling.
inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n)
                return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(threads, n);
    pool.reserve(k);
    for (int t = 0; t < k; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
}

inline int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 2 : static_cast<int>(n);
}

} // namespace multisle
