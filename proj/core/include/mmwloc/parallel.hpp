#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmwloc {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Work is handed out
/// by index so results written to slot i do not depend on scheduling. The
/// first exception thrown by fn is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    threads.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace mmwloc
