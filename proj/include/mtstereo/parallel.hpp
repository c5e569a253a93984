#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mts {

/// Number of worker threads to use when the caller passes 0.
inline int default_thread_count() {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [begin, end) on up to `threads` workers using static
/// contiguous blocks. Each index is visited exactly once, so results written to
/// per-index slots do not depend on the thread count. The first exception thrown
/// by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(int begin, int end, int threads, Body&& body) {
    const int count = end - begin;
    if (count <= 0) {
        return;
    }
    if (threads <= 0) {
        threads = default_thread_count();
    }
    threads = std::min(threads, count);
    if (threads == 1) {
        for (int i = begin; i < end; ++i) {
            body(i);
        }
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int lo = begin + static_cast<int>(static_cast<long long>(count) * t / threads);
        const int hi = begin + static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
        workers.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace mts
