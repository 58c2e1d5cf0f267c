#pragma once

#include <cstdint>
#include <span>

#include "corrl/errors.hpp"

namespace corrl {

// Deterministic, splittable randomness.
//
// Streams are xoshiro256++ generators whose state is seeded with SplitMix64.
// A stream is addressed by (root seed, episode, stage): the harness derives
// one root seed per run and every (episode, stage) cell gets its own stream,
// so results are bit-identical regardless of thread schedule or run order.

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& word : state_) word = splitmix64_next(s);
    }

    /// Stream for (root, episode, stage). Stage 0 is reserved for
    /// episode-level draws (initial state); in-episode stages use h+1.
    static Rng stream(uint64_t root, uint64_t episode, uint64_t stage) {
        uint64_t s = root;
        s = splitmix64_next(s) ^ (0x9e3779b97f4a7c15ULL * (episode + 1));
        s = splitmix64_next(s) ^ (0xd1b54a32d192ed03ULL * (stage + 1));
        return Rng(splitmix64_next(s));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) via rejection (unbiased).
    int uniform_int(int n) {
        const uint64_t bound = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t draw;
        do {
            draw = next_u64();
        } while (draw >= limit);
        return static_cast<int>(draw % bound);
    }

    /// Sample an index from a probability row by CDF walk.
    int categorical(std::span<const double> probs) {
        const double u = uniform01();
        double cum = 0.0;
        int last_positive = -1;
        for (size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            cum += probs[i];
            last_positive = static_cast<int>(i);
            if (u < cum) return last_positive;
        }
        if (last_positive < 0) throw NotARow("categorical: no positive mass");
        return last_positive; // u landed in rounding slack past the last entry
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4] = {};
};

} // namespace corrl
