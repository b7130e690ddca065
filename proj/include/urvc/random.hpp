#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace urvc {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Derives a child seed from a parent seed and a path of indices.
/// Distinct paths give statistically independent streams, so replications,
/// sweep points and per-purpose streams never share state.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t h = detail::splitmix64(seed);
    for (auto p : path)
        h = detail::splitmix64(h ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
{
    const auto s = derive_seed(seed, path);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Rng(seq);
}

/// Monte Carlo estimate of a Bernoulli probability.
struct BinomialEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;

    double mean() const { return trials ? double(successes) / double(trials) : 0.0; }
    double standard_error() const
    {
        if (!trials)
            return 0.0;
        const double p = mean();
        return std::sqrt(p * (1.0 - p) / double(trials));
    }
};

} // namespace urvc
