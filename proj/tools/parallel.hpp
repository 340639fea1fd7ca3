#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tdt::app {

// Applies fn(i) for i in [0, n) on up to `jobs` threads. Results keep input
// order; if several calls throw, the exception of the lowest index wins.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, Fn fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

} // namespace tdt::app
