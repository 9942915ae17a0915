#pragma once

// Seeded splitmix64 generator. Fully specified so runs are reproducible
// across platforms and implementations:
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// uniform() maps a draw to [0, 1) via (z >> 11) * 2^-53.

#include <cstdint>

namespace requforge {

class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Independent per-index stream: point i draws from SplitMix seeded with
/// seed + (i+1) * 0x9E3779B97F4A7C15. Order-independent, so parallel sweeps
/// reproduce the sequential result.
inline SplitMix point_stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace requforge
