#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

// Seed derivation and portable sampling helpers. All randomness in the
// pipeline flows through derive(): every (master seed, stream tag, index)
// triple yields an independent substream, so per-feature masks do not
// perturb each other. mt19937_64 output is fixed by the standard and the
// bounded draw below avoids the implementation-defined distributions,
// making results bit-stable across platforms.

namespace crilm::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t stream,
                               std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

constexpr std::uint64_t derive(std::uint64_t master, std::string_view tag,
                               std::uint64_t index = 0) {
    return derive(master, fnv1a(tag), index);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// Unbiased draw in [0, n) by rejection.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = gen();
        if (r >= threshold) return r % n;
    }
}

inline double unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// First m entries of a seeded Fisher-Yates shuffle of 0..n-1.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                           std::size_t m,
                                                           std::mt19937_64& gen) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m && i + 1 < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded(gen, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m < n ? m : n);
    return idx;
}

} // namespace crilm::rng
