#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace srmetro {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20140613ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a coordinate
/// tuple, e.g. {stream tag, grid point, trial}. Pure function of its inputs,
/// so any trial can be regenerated without replaying the others.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  return Rng(derive_seed(master, coords));
}

// Stream tags; keep stable, reports depend on them.
namespace stream {
inline constexpr std::uint64_t kPositions = 1;
inline constexpr std::uint64_t kTrial = 2;
inline constexpr std::uint64_t kSingleRun = 3;
inline constexpr std::uint64_t kOracleCases = 4;
}  // namespace stream

}  // namespace srmetro
