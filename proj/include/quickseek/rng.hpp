#pragma once

#include <cstdint>
#include <random>

namespace quickseek {

// splitmix64 finalizer; used to derive independent per-trial streams from a
// master seed by a counter-based split, so results never depend on which
// worker ran which trial.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// One RNG stream per trial/probe. mt19937_64 seeded from the split.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

}  // namespace quickseek
