#pragma once

// Deterministic seed derivation. Every randomized stage of the pipeline draws
// from its own generator whose seed is mixed from the master seed and a fixed
// set of stream tags, so serial and parallel executions produce identical
// results.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace issuetypes {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return std::mt19937_64(mix_seed(seed, tags));
}

// Stream tags for the pipeline stages that consume randomness.
namespace rng_stream {
inline constexpr std::uint64_t kOuterSplit = 0x01;
inline constexpr std::uint64_t kInnerSplit = 0x02;
inline constexpr std::uint64_t kSmote = 0x03;
inline constexpr std::uint64_t kModel = 0x04;
inline constexpr std::uint64_t kUndersample = 0x05;
}  // namespace rng_stream

}  // namespace issuetypes
