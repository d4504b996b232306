#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relax {

/// Worker count from RELAX_THREADS; unset, 0 or unparseable means hardware concurrency.
unsigned thread_count();

/// Runs body(chunk) for chunk in [0, n_chunks). Chunks are claimed dynamically,
/// so bodies must write only chunk-owned output for results to be deterministic.
template <typename Body>
void parallel_for_chunks(std::size_t n_chunks, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            body(c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace relax
