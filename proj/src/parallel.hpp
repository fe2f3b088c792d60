#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fragsel::detail {

// Runs fn(i) for i in [0, n) on up to `parallelism` threads. The first
// exception thrown by any worker is rethrown after all workers join.
inline void parallel_for(long n, long parallelism, const std::function<void(long)>& fn) {
    if (n <= 0) return;
    long workers = std::min<long>(std::max<long>(parallelism, 1), n);
    if (workers == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (long w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fragsel::detail
