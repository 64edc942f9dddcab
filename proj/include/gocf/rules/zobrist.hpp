#pragma once

#include <array>
#include <cstdint>

#include "gocf/core/types.hpp"

namespace gocf {

inline constexpr std::uint64_t kZobristSeed = 0x9E3779B97F4A7C15ULL;

// splitmix64 step: advances state and returns the next output.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Key table drawn from the splitmix64 stream seeded with kZobristSeed, in
// this order: for each point index 0..360 the black key then the white key,
// then the side-to-move key (XORed in while Black is to move).
struct ZobristKeys {
  std::array<std::array<std::uint64_t, 2>, kNumPoints> stone{};
  std::uint64_t black_to_move = 0;

  constexpr ZobristKeys() {
    std::uint64_t state = kZobristSeed;
    for (int p = 0; p < kNumPoints; ++p) {
      stone[p][0] = splitmix64_next(state);
      stone[p][1] = splitmix64_next(state);
    }
    black_to_move = splitmix64_next(state);
  }
};

inline constexpr ZobristKeys kZobrist{};

}  // namespace gocf
