#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>

#include "bitvec.hpp"

namespace xormmap {

// Counter-based generator: output i is splitmix64(seed + i*GAMMA). Streams for
// sub-tasks are derived by hashing (seed, path...) through the same mixer, so a
// master seed reproduces every sampled object regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + (v << 1)));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t v : path) s = seed_mix(s, v);
    return s;
}

// Purpose tags for seed derivation paths.
enum SeedTag : std::uint64_t {
    kSeedParity = 1,
    kSeedXorK = 2,
    kSeedXorBinary = 3,
    kSeedSaa = 4,
    kSeedGenerate = 5,
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return splitmix64(seed_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

    bool next_bit() {
        if (bit_fill_ == 0) {
            bit_buf_ = next_u64();
            bit_fill_ = 64;
        }
        bool b = bit_buf_ & 1;
        bit_buf_ >>= 1;
        bit_fill_--;
        return b;
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        assert(n > 0);
        std::uint64_t rem = UINT64_MAX % n;
        std::uint64_t limit = UINT64_MAX - rem;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x < limit || rem == n - 1) return x % n;
        }
    }

    // Whole words of fair coins; tail bits beyond n are masked to zero.
    BitVec random_bits(std::size_t n) {
        BitVec v(n);
        for (std::size_t w = 0; w < v.num_words(); w++) v.word(w) = next_u64();
        v.mask_tail();
        return v;
    }

    Rng derive(std::uint64_t tag) const { return Rng(seed_mix(seed_, tag)); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::uint64_t bit_buf_ = 0;
    int bit_fill_ = 0;
};

}  // namespace xormmap
