#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace fedpir {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed for an independent stream identified by a purpose tag plus indices.
// Streams differ whenever any tag differs, so draw order cannot leak between
// (i, t, p, tau) combinations.
inline uint64_t stream_seed(uint64_t master, uint64_t purpose, uint64_t a = 0,
                            uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(purpose));
    h = splitmix64(h ^ splitmix64(a + 1));
    h = splitmix64(h ^ splitmix64(b + 2));
    h = splitmix64(h ^ splitmix64(c + 3));
    h = splitmix64(h ^ splitmix64(d + 4));
    return h;
}

// Unbiased draw in [0, m). Rejection sampling instead of
// std::uniform_int_distribution, whose output is implementation-defined;
// reruns must be byte-identical across compilers.
inline uint64_t uniform_below(std::mt19937_64& g, uint64_t m) {
    if (m == 0) throw std::invalid_argument("uniform_below needs m > 0");
    const uint64_t rem = (UINT64_MAX % m + 1) % m; // 2^64 mod m
    for (;;) {
        const uint64_t v = g();
        if (rem == 0 || v < static_cast<uint64_t>(0) - rem) return v % m;
    }
}

} // namespace fedpir
