#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <string_view>

namespace phaselab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Counter-based so that independent, reproducible streams can be derived
// from a root seed plus a list of stream labels; the mapping
// (seed, labels..., counter) -> 128 output bits is a pure function and is
// identical on every platform.
class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t m0 = std::uint64_t(0xD2511F53u) * c[0];
        const std::uint64_t m1 = std::uint64_t(0xCD9E8D57u) * c[2];
        const auto hi0 = std::uint32_t(m0 >> 32), lo0 = std::uint32_t(m0);
        const auto hi1 = std::uint32_t(m1 >> 32), lo1 = std::uint32_t(m1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// A stream of pseudo-random values addressed by (seed, stream id).
// Stream ids are built by chaining `substream` calls with small integer
// labels, e.g. rng for qubit q in layer l of circuit c is
//   Rng(seed).substream(c).substream(l).substream(q).
// Chaining mixes each label into the 64-bit key with splitmix64, so distinct
// label paths give independent Philox keys.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed), counter_(0) {}

    Rng substream(std::uint64_t label) const {
        Rng child(mix(key_ ^ (label + 0x9E3779B97F4A7C15ull)));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() {
        if (cached_) {
            cached_ = false;
            return cache_;
        }
        const auto out = Philox::block(
            {std::uint32_t(counter_), std::uint32_t(counter_ >> 32), 0, 0},
            {std::uint32_t(key_), std::uint32_t(key_ >> 32)});
        ++counter_;
        cache_ = (std::uint64_t(out[2]) << 32) | out[3];
        cached_ = true;
        return (std::uint64_t(out[0]) << 32) | out[1];
    }

    // Uniform in [0, 1): 53 random mantissa bits.
    double next_double() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t(0)) / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // Standard normal via Box-Muller; one value per call, no caching of the
    // second so the draw count stays a pure function of the call count.
    double next_normal() {
        double u;
        do {
            u = next_double();
        } while (u == 0.0);
        const double v = next_double();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
    }

    // Exponential with unit mean.
    double next_exponential() {
        double u;
        do {
            u = next_double();
        } while (u == 0.0);
        return -std::log(u);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    std::uint64_t cache_ = 0;
    bool cached_ = false;
};

}  // namespace phaselab
