#pragma once

// Minimal index-parallel map used by grid solves and parameter sweeps.
// Deterministic by construction: body(i) may only write to slot i of a
// preallocated output, so results do not depend on scheduling.

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sikf::detail {

template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    if (n == 0) return;

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = hw == 0 ? 1 : hw;
    if (n_threads > n) n_threads = n;

    if (n_threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;

    for (std::size_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t] {
            const std::size_t lo = t * chunk;
            const std::size_t hi = lo + chunk < n ? lo + chunk : n;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace sikf::detail
