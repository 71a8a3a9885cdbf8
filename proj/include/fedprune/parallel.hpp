#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fedprune {

/// Worker count: FEDPRUNE_THREADS env var when set, hardware concurrency
/// otherwise, never more than `jobs`.
inline unsigned configured_thread_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("FEDPRUNE_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) n = static_cast<unsigned>(parsed);
    }
    if (n == 0) n = 1;
    if (jobs < n) n = static_cast<unsigned>(jobs);
    return n == 0 ? 1 : n;
}

/// Runs fn(0..n-1) across worker threads. Each index must write only its
/// own output slot; results are then independent of the thread count.
/// The first exception thrown by any job is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    const unsigned workers = configured_thread_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fedprune
