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

// Monte Carlo trial kernels. A bench and model are first reduced to a small
// per-trial program; the kernels then run that program over a contiguous
// range of trial indices and tally joint outcomes.
//
// Two program families:
//  - ThresholdProgram (qm, naive): the first registered photon is X iff
//    u0 < p_first, the second is X iff u1 < p_second[first outcome];
//  - SignProgram (lhv-sign): a shared hidden angle lambda = u0 * pi fixes both
//    outcomes through the sign rule.
//
// Every backend must produce bit-identical tallies for the same inputs.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "entangle/angles.hpp"
#include "entangle/philox.hpp"
#include "entangle/quantum_core.hpp"

namespace entangle::kernels {

enum class Backend : std::uint8_t { Auto, Scalar, Avx2 };

std::string_view backend_name(Backend b);
/// Throws InvalidArgument on an unknown name.
Backend parse_backend(std::string_view name);
bool avx2_available();
/// Auto resolves to the widest backend the CPU supports; an explicitly
/// requested backend the CPU lacks throws InvalidArgument.
Backend resolve(Backend requested);

struct ThresholdProgram {
  Channel first = Channel::B;
  double p_first = 0.5;
  double p_second_given_x = 0.5;
  double p_second_given_y = 0.5;
};

struct SignSetup {
  bool plate = false;
  double plate_angle = 0.0;
};

struct SignProgram {
  double alpha = 0.0;  // radians, canonical
  double beta = 0.0;
};

/// Joint counts indexed [XX, XY, YX, YY] by (outcome_a, outcome_b).
using Tally = std::array<std::uint64_t, 4>;

/// Histogram of the per-trial CHSH combination
/// s = p(a,b) - p(a,b') + p(a',b) + p(a',b'), with p = +1 on agreement and -1
/// otherwise; bins are s = -4, -2, 0, 2, 4.
using ChshHistogram = std::array<std::uint64_t, 5>;

struct Accumulator {
  explicit Accumulator(std::size_t programs = 1, bool track_chsh = false)
      : tallies(programs), track_chsh(track_chsh) {}

  std::vector<Tally> tallies;
  ChshHistogram chsh{};
  bool track_chsh = false;

  void merge(const Accumulator &other);
};

/// Programs share the trial's uniforms; the CHSH histogram needs exactly four
/// programs in the order (a,b), (a,b'), (a',b), (a',b').
void run_threshold(Backend backend, std::span<const ThresholdProgram> programs,
                   std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                   Accumulator &acc);

void run_sign(Backend backend, const SignSetup &setup, std::span<const SignProgram> programs,
              std::uint64_t seed, std::uint64_t begin, std::uint64_t end, Accumulator &acc);

// Per-trial reference semantics, shared by every backend's scalar tail.

struct TrialUniforms {
  double u0;
  double u1;
};

inline TrialUniforms trial_uniforms(std::uint64_t seed, std::uint64_t trial) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(trial),
                                static_cast<std::uint32_t>(trial >> 32), 0, 0};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto w = Philox4x32::generate(ctr, key);
  return {bits_to_unit(std::uint64_t{w[0]} | (std::uint64_t{w[1]} << 32)),
          bits_to_unit(std::uint64_t{w[2]} | (std::uint64_t{w[3]} << 32))};
}

/// (outcome_a, outcome_b)
inline std::pair<PolAxis, PolAxis> threshold_trial(const ThresholdProgram &p, double u0, double u1) {
  const bool first_x = u0 < p.p_first;
  const bool second_x = u1 < (first_x ? p.p_second_given_x : p.p_second_given_y);
  const PolAxis o1 = first_x ? PolAxis::X : PolAxis::Y;
  const PolAxis o2 = second_x ? PolAxis::X : PolAxis::Y;
  return p.first == Channel::A ? std::pair{o1, o2} : std::pair{o2, o1};
}

struct SignHidden {
  double a;
  double b;
};

inline SignHidden sign_hidden(const SignSetup &setup, double u0) {
  const double lambda = u0 * kPi;
  double a = reduce_mod_pi(lambda);
  if (setup.plate) a = reduce_mod_pi(a + 2.0 * setup.plate_angle);
  return {a, reduce_mod_pi(lambda + kHalfPi)};
}

inline std::pair<PolAxis, PolAxis> sign_trial(const SignHidden &h, const SignProgram &p) {
  return {sign_rule_is_x(p.alpha, h.a) ? PolAxis::X : PolAxis::Y,
          sign_rule_is_x(p.beta, h.b) ? PolAxis::X : PolAxis::Y};
}

namespace detail {

inline constexpr std::array<int, 4> kChshWeights{+1, -1, +1, +1};

// Backend entry points; `acc` already sized for `programs`.
void threshold_scalar(std::span<const ThresholdProgram> programs, std::uint64_t seed,
                      std::uint64_t begin, std::uint64_t end, Accumulator &acc);
void sign_scalar(const SignSetup &setup, std::span<const SignProgram> programs,
                 std::uint64_t seed, std::uint64_t begin, std::uint64_t end, Accumulator &acc);
void threshold_avx2(std::span<const ThresholdProgram> programs, std::uint64_t seed,
                    std::uint64_t begin, std::uint64_t end, Accumulator &acc);
void sign_avx2(const SignSetup &setup, std::span<const SignProgram> programs, std::uint64_t seed,
               std::uint64_t begin, std::uint64_t end, Accumulator &acc);

}  // namespace detail

}  // namespace entangle::kernels
