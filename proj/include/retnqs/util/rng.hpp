#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace retnqs {

inline auto splitmix64(std::uint64_t x) noexcept -> std::uint64_t
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic stream key derived from a seed and a list of counters.
inline auto derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept
    -> std::uint64_t
{
    auto key = splitmix64(seed);
    for (auto c : counters) { key = splitmix64(key ^ splitmix64(c + 0x632be59bd9b4e019ULL)); }
    return key;
}

/// Generator seeded from derive_key; independent streams for distinct counters.
inline auto derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters)
    -> std::mt19937_64
{
    return std::mt19937_64{derive_key(seed, counters)};
}

} // namespace retnqs
