#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace recap {

inline unsigned resolve_threads(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Block-partitioned parallel loop. Workers write only to disjoint indices of
// caller-owned storage; any reduction over results must happen afterwards in
// index order so that float sums do not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const unsigned t = resolve_threads(threads);
    if (t <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned nt = static_cast<unsigned>(t < n ? t : n);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned w = 0; w < nt; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / nt;
            const std::size_t hi = n * (w + 1) / nt;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace recap
