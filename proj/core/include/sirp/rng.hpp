#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sirp {

// Deterministic random source. All draws are derived from the raw
// mt19937_64 stream with fixed arithmetic; std::uniform_real_distribution
// and friends are implementation-defined and would break bit-for-bit
// reproducibility of seeded runs across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform draw strictly inside (0, 1): 53 significant bits, offset by
    // half an ulp so neither endpoint can be returned.
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard logistic variate via inverse CDF (used as kernel sampler).
    double logistic() {
        const double u = uniform01();
        return std::log(u / (1.0 - u));
    }

    // Uniform integer in [lo, hi], rejection sampled (no modulo bias).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return lo + static_cast<int>(r % span);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace sirp
