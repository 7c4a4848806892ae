#pragma once

#include <cstdint>
#include <random>

namespace misanthrope {

/// Engine used for every stochastic path. mt19937_64 output is fixed by the
/// standard, so streams are reproducible across compilers.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream identifier for (base seed, replica, cell). Injective in
/// (replica, cell) for replica, cell < 2^32 at fixed base seed: the packed
/// pair is mapped through a bijection and combined with the base by xor.
/// Stable within a major release.
constexpr std::uint64_t seed_plan(std::uint64_t base_seed, std::uint32_t replica, std::uint32_t cell) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(cell) << 32) | replica;
  return mix64(mix64(base_seed) ^ packed);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in (0, 1].
inline double uniform01_open_low(Rng& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace misanthrope
