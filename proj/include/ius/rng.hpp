#pragma once

// Deterministic counter-style random stream. Monte-Carlo trials derive one
// substream per (seed, stream) pair, so results do not depend on thread
// scheduling and are reproducible bit for bit across runs.
//
// The generator is SplitMix64; Gaussian variates come from a hand-rolled
// Box-Muller so distributions are identical on every standard library.

#include <cmath>
#include <cstdint>

#include "ius/types.hpp"

namespace ius {

namespace detail {
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(detail::mix64(seed)) {}

    Rng(uint64_t seed, uint64_t stream)
        : state_(detail::mix64(detail::mix64(seed) ^ (0x632be59bd9b4e019ULL * (stream + 1)))) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Inclusive range, rejection-sampled to avoid modulo bias.
    int uniform_int(int lo, int hi) {
        uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return lo + static_cast<int>(x % span);
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx cgaussian(double variance) {
        double s = std::sqrt(variance / 2.0);
        double re = s * gaussian();
        double im = s * gaussian();
        return {re, im};
    }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ius
