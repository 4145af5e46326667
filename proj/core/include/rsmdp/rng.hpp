#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rsmdp {

// Deterministic random source. Doubles are derived from raw mt19937_64
// words rather than <random> distributions, so streams are identical
// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard exponential
    double exponential() { return -std::log1p(-uniform01()); }

    // uniform integer in [0, n), n >= 1
    int below(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 gen_;
};

}  // namespace rsmdp
