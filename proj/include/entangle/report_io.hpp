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

// Bench configuration files:
//   {"d_plate_a_m": 0.5, "d_prism_a_m": 1.5, "d_prism_b_m": 1.0,
//    "alpha_deg": 0, "beta_deg": 0, "plate_present": true, "plate_angle_deg": 45}
// Every key is optional; absent keys keep the values of `base`.

#include <string>

#include "entangle/bench.hpp"

namespace entangle {

/// Throws InvalidArgument on malformed JSON, unknown keys or wrong types, and
/// InvalidBench when the resulting bench is invalid.
OpticalBench bench_from_json(const std::string &text, const OpticalBench &base = {});
OpticalBench load_bench_file(const std::string &path, const OpticalBench &base = {});
std::string bench_to_json(const OpticalBench &bench);

}  // namespace entangle
