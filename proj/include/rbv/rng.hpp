#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "rbv/special.hpp"

namespace rbv {

// All randomness in the library flows from a single root seed through named
// substreams, so individual stages reproduce the same draws whether or not
// the stages before them ran. Substream seeds are derived by hashing the
// tag and salts into the root seed (FNV-1a + splitmix finalizer).

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t root, std::string_view tag,
                                    std::uint64_t salt_a = 0, std::uint64_t salt_b = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ root;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h = splitmix64(h ^ splitmix64(salt_a));
    h = splitmix64(h ^ splitmix64(salt_b ^ 0xa5a5a5a5a5a5a5a5ULL));
    return h;
}

// Thin wrapper around mt19937_64 with pinned value -> double conversions.
// std::uniform_real_distribution / std::normal_distribution are not pinned by
// the standard, so we do the conversions ourselves (53-bit mantissa uniform,
// inverse-CDF normal) to keep streams identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer on [0, n), n >= 1. Rejection sampling, unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via inverse CDF; uniform01 == 0 is nudged away from 0.
    double normal() {
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        return normal_quantile(u);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace rbv
