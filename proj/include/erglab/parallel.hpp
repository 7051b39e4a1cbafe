#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace erglab {

// Runs f(i) for i in [0, count). Workers take contiguous chunks; callers
// store results into preallocated index slots and reduce in index order
// afterwards, so the outcome is independent of the thread count.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& f) {
    if (threads < 1) threads = 1;
    if (threads == 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) f(i);
        return;
    }
    if (threads > count) threads = static_cast<int>(count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    std::int64_t chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        std::int64_t lo = w * chunk;
        std::int64_t hi = std::min(count, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (std::int64_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace erglab
