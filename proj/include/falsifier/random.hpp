#pragma once

// Seed derivation and the counter-addressable generator used everywhere
// randomness enters (splits, permutations, simulation trials).
//
// A stream is identified by (master seed, purpose tag, index). Deriving each
// permutation replica or simulation trial from its own stream makes results
// independent of execution order and worker count.

#include <cstdint>
#include <limits>
#include <random>

namespace falsifier {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Purpose tags keep streams for different uses disjoint under one seed.
enum class StreamTag : std::uint64_t {
    Split = 1,
    Permutation = 2,
    Trial = 3,
    Generate = 4,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                           std::uint64_t index) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return splitmix64(h ^ splitmix64(index));
}

// SplitMix64 as a UniformRandomBitGenerator. Cheap to construct, which
// matters because one is built per permutation replica.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline SplitMix64 make_stream(std::uint64_t master, StreamTag tag,
                              std::uint64_t index) noexcept {
    return SplitMix64(derive_seed(master, tag, index));
}

// Unbiased integer in [0, bound) by rejection on the top of the 64-bit range.
// Written out so draws are identical across standard library implementations.
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) noexcept {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(SplitMix64& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace falsifier
