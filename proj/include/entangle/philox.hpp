// Copyright 2026 The entangle-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Counter-based randomness. Every uniform used by a trial is a pure function
// of (master_seed, trial_index, draw_counter), so trials can run in any order
// or on any thread and still see the same numbers.
//
// Mapping:
//   key     = (seed_lo32, seed_hi32)
//   counter = (trial_lo32, trial_hi32, draw / 2, 0)
//   block   = Philox4x32-10(counter, key)
//   bits    = block[2m] | block[2m + 1] << 32   with m = draw % 2
//   u       = (bits >> 12) * 2^-52             in [0, 1)

#include <array>
#include <bit>
#include <cstdint>

namespace entangle {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Top 52 bits of a 64-bit word as a double in [0, 1).
inline double bits_to_unit(std::uint64_t bits) {
  return std::bit_cast<double>((bits >> 12) | 0x3FF0000000000000ull) - 1.0;
}

inline std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t trial, std::uint32_t draw) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(trial),
                                static_cast<std::uint32_t>(trial >> 32), draw / 2, 0};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto block = Philox4x32::generate(ctr, key);
  const unsigned m = 2 * (draw % 2);
  return std::uint64_t{block[m]} | (std::uint64_t{block[m + 1]} << 32);
}

/// The uniforms of one trial.
class TrialDraws {
 public:
  TrialDraws(std::uint64_t seed, std::uint64_t trial) : seed_(seed), trial_(trial) {}
  double uniform(std::uint32_t draw) const { return bits_to_unit(draw_bits(seed_, trial_, draw)); }

 private:
  std::uint64_t seed_;
  std::uint64_t trial_;
};

}  // namespace entangle

namespace entangle {

/// Independent child seed for stream `stream` of `master`. Uses counter word 3
/// = 1, which trial draws never touch.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(stream),
                                static_cast<std::uint32_t>(stream >> 32), 0, 1};
  const Philox4x32::Key key{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)};
  const auto block = Philox4x32::generate(ctr, key);
  return std::uint64_t{block[0]} | (std::uint64_t{block[1]} << 32);
}

}  // namespace entangle
