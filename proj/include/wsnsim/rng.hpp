#pragma once

#include <cstdint>

namespace wsnsim {

// SplitMix64: seedable 64-bit generator with a fixed, platform-independent
// bitstream. Every stochastic path in the library draws from this type, so a
// (config, seed) pair fully determines simulation output.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Independent stream for a sub-experiment (row of a sweep, node of a sim).
    SplitMix64 split() { return SplitMix64(next_u64()); }

private:
    std::uint64_t state_;
};

} // namespace wsnsim
