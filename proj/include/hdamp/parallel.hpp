#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace hdamp {

// HDAMP_THREADS caps worker threads; unset or 0 means hardware concurrency.
inline unsigned thread_budget() {
    unsigned budget = 0;
    if (const char* env = std::getenv("HDAMP_THREADS")) {
        try {
            budget = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            budget = 0;
        }
    }
    if (budget == 0) {
        budget = std::max(1u, std::thread::hardware_concurrency());
    }
    return budget;
}

// results[i] = fn(i) for i in [0, n).  Output order never depends on scheduling;
// the exception from the lowest failing index is rethrown.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn fn) {
    std::vector<R> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_budget(), n));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

}  // namespace hdamp
