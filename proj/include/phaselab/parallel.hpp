#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace phaselab {

// Worker count: min(hardware, PHASELAB_THREADS if set).
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("PHASELAB_THREADS")) {
        const long cap = std::atol(env);
        if (cap > 0 && unsigned(cap) < hw) hw = unsigned(cap);
    }
    return hw;
}

// Static block partition of [0, count) over the thread budget. Workers share
// nothing; `fn(index)` must be safe to run concurrently for distinct indices.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = thread_budget();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace phaselab
