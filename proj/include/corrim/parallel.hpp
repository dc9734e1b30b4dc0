#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace corrim {

// Process-wide cap on worker threads (the CLI's --threads). 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(begin, end) over a static partition of [0, n). Workers write to disjoint
// output slots; callers reduce in index order so results do not depend on the cap.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        if (n) body(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
}

}  // namespace corrim
