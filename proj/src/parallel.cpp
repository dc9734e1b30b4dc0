#include "corrim/parallel.hpp"

#include <atomic>

namespace corrim {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    const unsigned cap = g_max_threads.load();
    if (cap) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace corrim
