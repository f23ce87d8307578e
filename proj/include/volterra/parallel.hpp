#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace volterra {

/// Runs body(i) for i in [begin, end). With parallel = true indices are dealt
/// round-robin to one thread per hardware core. body must only write to state
/// owned by index i.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, bool parallel, Body&& body) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    std::size_t workers = parallel ? std::max<std::size_t>(2, std::thread::hardware_concurrency()) : 1;
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    // Round-robin balances the triangular cost of Volterra sums.
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = begin + w; i < end; i += workers) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace volterra
