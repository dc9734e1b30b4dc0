#pragma once

#include <cstdint>
#include <random>

namespace corrim {

// A seedable random stream identified by (seed, stream). Distinct stream indices give
// statistically independent sequences, so per-edge and per-sample draws do not depend
// on evaluation order or thread count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0x636f7272u};
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // True with probability p; p = 0 never fires, p = 1 always fires.
    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace corrim
