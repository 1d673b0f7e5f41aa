#pragma once

#include <cstdint>
#include <random>

namespace ctree {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-style substream seed keyed by (master, a, b). Independent of
/// scheduling order, so replicates can run on any worker.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) + 0x632BE59BD9B4E019ULL * (b + 1));
}

inline Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return Rng(substream_seed(master, a, b));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace ctree
