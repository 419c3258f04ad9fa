#pragma once

#include <cstdint>
#include <vector>

namespace spx {

// All randomness in the pipeline flows through this header so that parallel
// and serial runs agree bit for bit. Every task derives its own stream with
// derive_seed(root, tag...) and never shares generator state across tasks.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed-splitting rule: fold each tag into the state with one splitmix64 round.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}
inline uint64_t derive_seed(uint64_t seed, uint64_t tag1, uint64_t tag2) {
    return derive_seed(derive_seed(seed, tag1), tag2);
}
inline uint64_t derive_seed(uint64_t seed, uint64_t tag1, uint64_t tag2, uint64_t tag3) {
    return derive_seed(derive_seed(seed, tag1, tag2), tag3);
}

// Small xorshift-family generator with a fully specified algorithm, so
// sequences are identical across compilers and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 expansion, the standard seeding for xoshiro256**
        uint64_t x = seed;
        for (auto& word : state_) {
            x = splitmix64(x);
            word = x;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Rejection-free multiply-shift would bias
    // by < 2^-64; the debiased loop keeps sequences exactly reproducible.
    uint64_t next_below(uint64_t bound) {
        // Lemire's method with rejection
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            const uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

// Fisher-Yates, high index down, j = next_below(i + 1).
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

// FNV-1a 64-bit, used for artifact staleness hashes.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xCBF29CE484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace spx
