#pragma once

#include <cstdint>
#include <initializer_list>

namespace bgw {

// SplitMix64. Doubles as the simulation engine and as the mixer that derives
// independent substreams from structured keys (trial, generation, type).
// Stateless derivation keeps batches order-independent and parallel-safe.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Hash a master seed together with a key tuple into a stream seed. The same
// (master, key) always yields the same stream regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ull);
    for (std::uint64_t k : key) {
        h = mix64(h ^ (k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
    }
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Per-trial stream bundle. Draws for (generation, couple type) come from a
// dedicated substream, so two runs sharing a seed stay couple-aligned: if one
// run spawns fewer couples of a type, its draws are a prefix of the other's.
// This is what makes the monotone-coupling invariant of the simulator exact
// in the per-couple sampling regime.
struct TrialStream {
    std::uint64_t master = 0;
    std::uint64_t trial = 0;

    SplitMix64 substream(std::uint64_t generation, std::uint64_t type_index) const {
        return SplitMix64(derive_seed(master, {0x747269616cull, trial, generation, type_index}));
    }
};

}  // namespace bgw
