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

#include <cmath>
#include <numbers>

namespace entangle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;
inline constexpr double kThreeQuarterPi = 3.0 * std::numbers::pi / 4.0;

/// Reduces an angle into [0, pi). The exact operation sequence is mirrored by
/// the SIMD kernels, so any change here must be made there too.
inline double reduce_mod_pi(double x) {
  const double q = std::floor(x / kPi);
  double r = x - kPi * q;
  if (r < 0.0) r = r + kPi;
  if (r >= kPi) r = r - kPi;
  return r;
}

/// Sign rule shared by the local models: true ("X") iff cos 2(setting - angle) >= 0,
/// evaluated without trigonometry as a range test on the reduced difference.
inline bool sign_rule_is_x(double setting, double angle) {
  const double d = reduce_mod_pi(setting - angle);
  return d <= kQuarterPi || d >= kThreeQuarterPi;
}

inline double degrees_to_radians(double deg) { return deg * (kPi / 180.0); }
inline double radians_to_degrees(double rad) { return rad * (180.0 / kPi); }

}  // namespace entangle
