#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace corrbandit {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the `index`-th child stream of `parent`.
///
/// derive_seed(s, i) = mix64(mix64(s) ^ mix64(i + 0x632be59bd9b4e019)).
/// Per-cycle and per-grid-point seeds are produced this way so results do not
/// depend on execution order or the number of workers.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept
{
    return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Child stream keyed by a real parameter (its IEEE-754 bit pattern).
inline std::uint64_t derive_seed(std::uint64_t parent, double key) noexcept
{
    return derive_seed(parent, std::bit_cast<std::uint64_t>(key));
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace corrbandit
