#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tfs {

using Rng = std::mt19937_64;

// Independent generator for a named component, derived from one seed.
inline Rng substream(uint64_t seed, std::string_view name) {
  uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(h), static_cast<uint32_t>(h >> 32)};
  return Rng(seq);
}

inline uint64_t uniform_below(Rng& rng, uint64_t bound) {
  return std::uniform_int_distribution<uint64_t>(0, bound - 1)(rng);
}

}  // namespace tfs
