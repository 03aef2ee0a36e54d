#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mdm/summation.hpp"

namespace mdm {

/// out[i] = fn(i) for i < n on up to `threads` workers. Slots are written by
/// index, so the result does not depend on the thread count or schedule.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<T> out(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1U), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

/// Compensated sum of the values in index order.
inline double ordered_sum(const std::vector<double>& values) {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

}  // namespace mdm
