#pragma once

// Counter-based sampling RNG.  Each sample index gets its own substream
// derived from (seed, index), so draws are reproducible and independent of
// the order in which workers pick up samples.  The mixer is splitmix64
// (Steele, Lea & Flood's SplittableRandom finalizer), which is more than
// adequate for Monte-Carlo sampling.

#include <cstdint>

namespace basinforge {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Keyed substream: CounterRng(seed, i) always yields the same draws for the
/// same (seed, i), regardless of any other stream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index)
        : state_(seed + 0x9E3779B97F4A7C15ULL * (index + 1)) {
        // Re-base the substream on the mixed key.  Offsetting the raw key by
        // one increment per index is NOT enough: consecutive substreams would
        // then walk the same state sequence one step apart, and draw k of
        // stream i would equal draw k-1 of stream i+1.  Mixing first makes
        // a state collision between substreams vanishingly unlikely.
        state_ = splitmix64(state_);
    }

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace basinforge
