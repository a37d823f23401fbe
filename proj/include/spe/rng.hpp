#pragma once

#include <cstdint>

namespace spe {

// splitmix64; used to derive independent sub-streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. All library draws go through uniform01() /
// normal() so that a seed fully determines every result on any platform
// (std::normal_distribution is implementation-defined; we avoid it).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix_seed(seed, 0)) {
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next_u64() {
        // xorshift64* keeps the stream cheap and reproducible.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dULL;
    }

    // Uniform on the open interval (0, 1): safe input for quantile transforms.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via inverse-CDF (defined in rng.cpp).
    double normal();

  private:
    std::uint64_t state_;
};

}  // namespace spe
