#pragma once

#include <cstdint>
#include <random>

namespace netclust {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; good avalanche, used to derive independent streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `index` of `seed`. Streams for distinct indices are
/// unrelated, so replications can run in any order on any worker.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(derive_seed(seed, index));
}

/// Fixed stream tags so each consumer within a replication draws from its own
/// stream regardless of what the others consume.
namespace stream {
inline constexpr std::uint64_t kGraph = 1;
inline constexpr std::uint64_t kClustering = 2;
inline constexpr std::uint64_t kOutcomes = 3;
inline constexpr std::uint64_t kPilot = 4;
}  // namespace stream

}  // namespace netclust
