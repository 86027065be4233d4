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

#include <string>

#include "entangle/errors.hpp"
#include "entangle/kernels.hpp"

namespace entangle::kernels {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

Backend parse_backend(std::string_view name) {
  if (name == "auto") return Backend::Auto;
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw InvalidArgument("unknown kernel backend '" + std::string(name) + "'");
}

bool avx2_available() {
#if defined(ENTANGLE_HAVE_AVX2_KERNELS)
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return has;
#else
  return false;
#endif
}

Backend resolve(Backend requested) {
  switch (requested) {
    case Backend::Auto: return avx2_available() ? Backend::Avx2 : Backend::Scalar;
    case Backend::Avx2:
      if (!avx2_available()) throw InvalidArgument("AVX2 kernels requested but unavailable");
      return Backend::Avx2;
    case Backend::Scalar: return Backend::Scalar;
  }
  return Backend::Scalar;
}

void Accumulator::merge(const Accumulator &other) {
  if (other.tallies.size() != tallies.size()) throw InvalidArgument("accumulator shape mismatch");
  for (std::size_t j = 0; j < tallies.size(); ++j) {
    for (std::size_t k = 0; k < 4; ++k) tallies[j][k] += other.tallies[j][k];
  }
  for (std::size_t k = 0; k < chsh.size(); ++k) chsh[k] += other.chsh[k];
}

namespace {

void check_shape(std::size_t programs, const Accumulator &acc) {
  if (programs == 0) throw InvalidArgument("no kernel programs");
  if (acc.tallies.size() != programs) throw InvalidArgument("accumulator/program count mismatch");
  if (acc.track_chsh && programs != 4) throw InvalidArgument("CHSH tracking needs four programs");
}

}  // namespace

void run_threshold(Backend backend, std::span<const ThresholdProgram> programs,
                   std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                   Accumulator &acc) {
  check_shape(programs.size(), acc);
  if (resolve(backend) == Backend::Avx2) {
    detail::threshold_avx2(programs, seed, begin, end, acc);
  } else {
    detail::threshold_scalar(programs, seed, begin, end, acc);
  }
}

void run_sign(Backend backend, const SignSetup &setup, std::span<const SignProgram> programs,
              std::uint64_t seed, std::uint64_t begin, std::uint64_t end, Accumulator &acc) {
  check_shape(programs.size(), acc);
  if (resolve(backend) == Backend::Avx2) {
    detail::sign_avx2(setup, programs, seed, begin, end, acc);
  } else {
    detail::sign_scalar(setup, programs, seed, begin, end, acc);
  }
}

}  // namespace entangle::kernels
