#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tbma {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used only to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a path of tags, e.g.
// derive_seed(seed, {kNoiseStream, round, block}). Streams addressed by
// distinct paths are independent of the order in which they are created,
// which is what keeps results identical under any thread schedule.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(seed, path));
}

// Stream tags.
enum StreamTag : std::uint64_t {
  kInitStream = 1,
  kShardStream = 2,
  kLocalTrainStream = 3,
  kNoiseStream = 4,
  kChannelSeed = 5,
  kDataStream = 6,
};

}  // namespace tbma
