#pragma once

#include <cstdint>
#include <random>

namespace nlcalib {

// Deterministic random source. mt19937_64 output is fixed by the standard
// and all derived draws below avoid std::uniform_*_distribution, whose
// streams vary across library implementations.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : gen_(seed) {}

    uint64_t bits() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in [0, bound) without modulo bias.
    uint64_t below(uint64_t bound) {
        if (bound < 2) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        for (;;) {
            const uint64_t v = gen_();
            if (v < limit) return v % bound;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    long range(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<uint64_t>(hi - lo) + 1));
    }

    bool coin() { return (gen_() >> 63) != 0; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace nlcalib
