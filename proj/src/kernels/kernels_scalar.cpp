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

#include "entangle/kernels.hpp"

namespace entangle::kernels::detail {

namespace {

template <class TrialFn>
void tally_trial(std::size_t programs, Accumulator &acc, TrialFn &&trial) {
  int s = 0;
  for (std::size_t j = 0; j < programs; ++j) {
    const auto [a, b] = trial(j);
    ++acc.tallies[j][joint_index(a, b)];
    if (acc.track_chsh) s += kChshWeights[j] * (a == b ? 1 : -1);
  }
  if (acc.track_chsh) ++acc.chsh[static_cast<std::size_t>((s + 4) / 2)];
}

}  // namespace

void threshold_scalar(std::span<const ThresholdProgram> programs, std::uint64_t seed,
                      std::uint64_t begin, std::uint64_t end, Accumulator &acc) {
  for (std::uint64_t t = begin; t < end; ++t) {
    const auto u = trial_uniforms(seed, t);
    tally_trial(programs.size(), acc, [&](std::size_t j) { return threshold_trial(programs[j], u.u0, u.u1); });
  }
}

void sign_scalar(const SignSetup &setup, std::span<const SignProgram> programs,
                 std::uint64_t seed, std::uint64_t begin, std::uint64_t end, Accumulator &acc) {
  for (std::uint64_t t = begin; t < end; ++t) {
    const auto h = sign_hidden(setup, trial_uniforms(seed, t).u0);
    tally_trial(programs.size(), acc, [&](std::size_t j) { return sign_trial(h, programs[j]); });
  }
}

}  // namespace entangle::kernels::detail
