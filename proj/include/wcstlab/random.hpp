#pragma once

#include <cstdint>
#include <random>

namespace wcst {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent per-item seeds (per
// permutation, per channel, per session) from one base seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline int uniform_index(Rng& rng, int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

}  // namespace wcst
