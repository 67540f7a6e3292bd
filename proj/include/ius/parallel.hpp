#pragma once

// Tiny work-sharing helper. Workers pull indices from an atomic counter;
// callers that reduce keep one accumulator per worker and merge them in
// worker order so results do not depend on scheduling.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ius {

inline int default_threads() {
    if (const char* env = std::getenv("IUS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// body(index, worker_id) is invoked once for every index in [0, n).
template <class F>
void parallel_for(long long n, int threads, F&& body) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (long long i = 0; i < n; ++i) body(i, 0);
        return;
    }
    if (threads > n) threads = static_cast<int>(n);
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int tid = 0; tid < threads; ++tid) {
        pool.emplace_back([&, tid]() {
            for (;;) {
                long long i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                body(i, tid);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ius
