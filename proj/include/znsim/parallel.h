// Minimal block-partitioned parallel loop. Work items must be independent;
// determinism of results is the caller's responsibility (per-index random
// streams, order-independent reductions).
#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace znsim {

inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs worker(begin, end) over a block partition of [0, n) on `jobs` threads
// (0 = hardware concurrency). Rethrows the first worker exception.
inline void parallel_for_blocks(std::size_t n, unsigned jobs,
                                const std::function<void(std::size_t, std::size_t)>& worker) {
    jobs = resolve_jobs(jobs);
    if (n == 0) return;
    if (jobs <= 1 || n == 1) {
        worker(0, n);
        return;
    }
    if (jobs > n) jobs = static_cast<unsigned>(n);

    std::vector<std::thread> threads;
    threads.reserve(jobs);
    std::exception_ptr first_error;
    std::mutex error_mutex;

    for (unsigned b = 0; b < jobs; ++b) {
        std::size_t begin = n * b / jobs;
        std::size_t end = n * (b + 1) / jobs;
        threads.emplace_back([&, begin, end] {
            try {
                worker(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace znsim
