#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace emdtest {

/// Seeded pseudo-random stream used everywhere randomness is needed.
///
/// The engine is mt19937_64, whose output sequence is fixed by the C++
/// standard, and all derived draws (uniform doubles, bounded integers) are
/// computed from raw engine words with explicit arithmetic rather than
/// through std::*_distribution adapters, so identical seeds give identical
/// streams on every platform. Reports record the generator name and seed.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace emdtest
