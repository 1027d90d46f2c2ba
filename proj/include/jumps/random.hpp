#pragma once

#include <cstdint>
#include <random>

namespace jumps {

// SplitMix64 finalizer. Used as the bit mixer for seed derivation and for
// provenance hashes.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_mix(std::uint64_t state, std::uint64_t value) {
  return splitmix64(state ^ splitmix64(value));
}

// Uniform double in [0, 1) with 53 random bits. Replaces
// std::uniform_real_distribution so that a seeded stream produces the same
// values on every standard library implementation.
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace jumps
