#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kloostpath {

// Worker count: hardware concurrency capped by KLOOSTPATH_THREADS.
unsigned worker_count();

// Splits [begin, end) into a fixed number of chunks (independent of the
// worker count) and reduces chunk results in index order, so floating-point
// output is identical for any thread configuration.
template <typename T, typename Fn>
T parallel_sum(std::uint64_t begin, std::uint64_t end, Fn&& chunk_sum) {
    if (end <= begin) return T{};
    const std::uint64_t total = end - begin;
    const std::uint64_t chunks = std::min<std::uint64_t>(256, total);
    const std::uint64_t step = (total + chunks - 1) / chunks;

    std::vector<T> partial(chunks, T{});
    unsigned workers = std::min<std::uint64_t>(worker_count(), chunks);
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) {
            std::uint64_t lo = begin + c * step;
            std::uint64_t hi = std::min(end, lo + step);
            partial[c] = chunk_sum(lo, hi);
        }
    } else {
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t c = w; c < chunks; c += workers) {
                        std::uint64_t lo = begin + c * step;
                        std::uint64_t hi = std::min(end, lo + step);
                        partial[c] = chunk_sum(lo, hi);
                    }
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }
    T acc{};
    for (const T& v : partial) acc += v;
    return acc;
}

} // namespace kloostpath
