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

// Two-photon polarization state algebra: one polarization qubit per channel,
// amplitudes stored in the fixed order [XX, XY, YX, YY] (first letter is
// photon a). All functions are pure; measurement randomness is passed in.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>

namespace entangle {

using Complex = std::complex<double>;

/// Tolerance for every exact-algebra check (normalization, unitarity, ...).
inline constexpr double kExactTol = 1e-12;

enum class Channel : std::uint8_t { A, B };
enum class PolAxis : std::uint8_t { X, Y };

inline constexpr Channel other(Channel c) { return c == Channel::A ? Channel::B : Channel::A; }
inline constexpr char axis_char(PolAxis p) { return p == PolAxis::X ? 'X' : 'Y'; }
inline constexpr char channel_char(Channel c) { return c == Channel::A ? 'A' : 'B'; }

/// Joint index of (axis_a, axis_b) in [XX, XY, YX, YY].
inline constexpr std::size_t joint_index(PolAxis a, PolAxis b) {
  return 2 * static_cast<std::size_t>(a) + static_cast<std::size_t>(b);
}

/// Analyzer orientation in radians, canonical in [0, pi).
class AnalyzerSetting {
 public:
  AnalyzerSetting() = default;
  /// Throws InvalidArgument on non-finite input.
  explicit AnalyzerSetting(double radians);
  static AnalyzerSetting from_degrees(double degrees);

  double radians() const { return radians_; }
  double degrees() const;

  friend bool operator==(const AnalyzerSetting &, const AnalyzerSetting &) = default;

 private:
  double radians_ = 0.0;
};

using JonesVector = std::array<Complex, 2>;

/// 2x2 complex matrix acting on one photon's polarization, row-major.
class JonesMatrix {
 public:
  JonesMatrix() = default;
  JonesMatrix(Complex m00, Complex m01, Complex m10, Complex m11) : m_{m00, m01, m10, m11} {}

  static JonesMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Complex operator()(std::size_t row, std::size_t col) const { return m_[2 * row + col]; }
  JonesMatrix operator*(const JonesMatrix &rhs) const;
  JonesMatrix adjoint() const;

  /// max |(M M^dagger - I)_ij| <= tol
  bool is_unitary(double tol = kExactTol) const;
  double max_abs_diff(const JonesMatrix &other) const;

 private:
  std::array<Complex, 4> m_{};
};

class TwoPhotonState {
 public:
  using Amplitudes = std::array<Complex, 4>;

  /// Validates finiteness and normalization (within kExactTol).
  static TwoPhotonState from_amplitudes(const Amplitudes &amps);
  static TwoPhotonState product(PolAxis a, PolAxis b);
  static TwoPhotonState product(const JonesVector &a, const JonesVector &b);

  const Amplitudes &amps() const { return amps_; }
  Complex amp(PolAxis a, PolAxis b) const { return amps_[joint_index(a, b)]; }
  double norm_squared() const;

  TwoPhotonState operator-() const;

  /// {"amps": [[re, im], ...]} with 17 significant digits.
  std::string to_json() const;
  static TwoPhotonState from_json(const std::string &text);

  friend bool operator==(const TwoPhotonState &, const TwoPhotonState &) = default;

 private:
  explicit TwoPhotonState(const Amplitudes &amps) : amps_(amps) {}
  Amplitudes amps_{};
};

struct ProbTable {
  std::array<double, 4> p{};
  double at(PolAxis a, PolAxis b) const { return p[joint_index(a, b)]; }
};

struct Marginal {
  double p_x = 0.0;
  double p_y = 0.0;

  friend bool operator==(const Marginal &, const Marginal &) = default;
};

struct MeasurementResult {
  PolAxis outcome;
  TwoPhotonState collapsed;
  double probability;
};

/// Orthonormal analyzer basis: the X' and Y' output ports of a prism at `setting`.
struct AnalyzerBasis {
  JonesVector x;
  JonesVector y;
  const JonesVector &port(PolAxis p) const { return p == PolAxis::X ? x : y; }
};

/// (|x>_a |y>_b + |y>_a |x>_b) / sqrt(2)
TwoPhotonState make_anticorrelated_pair();

/// Real half-wave-plate Jones matrix [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
JonesMatrix hwp_jones(double plate_angle);

/// (J (x) I) or (I (x) J) applied to the joint state. Throws on non-unitary J.
TwoPhotonState apply_element(const TwoPhotonState &state, Channel channel, const JonesMatrix &j);

AnalyzerBasis analyzer_basis(AnalyzerSetting setting);

ProbTable joint_probabilities(const TwoPhotonState &state, AnalyzerSetting alpha,
                              AnalyzerSetting beta);

Marginal marginal(const TwoPhotonState &state, Channel channel, AnalyzerSetting setting);

/// Probability of the X' outcome as used by the threshold sampling rule.
/// Values within 1e-15 of 0 or 1 are snapped so that a branch of vanishing
/// weight can never be selected.
double branch_threshold(const TwoPhotonState &state, Channel channel, AnalyzerSetting setting);

/// Projective measurement of one channel. Outcome is X' iff u < branch_threshold,
/// so u == threshold lands on Y'. The projection acts on the joint state.
MeasurementResult measure_channel(const TwoPhotonState &state, Channel channel,
                                  AnalyzerSetting setting, double u);

/// E = p_XX + p_YY - p_XY - p_YX
double correlation_E(const TwoPhotonState &state, AnalyzerSetting alpha, AnalyzerSetting beta);

/// |<s1|s2>| >= 1 - tol
bool states_equal_up_to_phase(const TwoPhotonState &s1, const TwoPhotonState &s2, double tol);

Complex inner_product(const TwoPhotonState &bra, const TwoPhotonState &ket);

}  // namespace entangle
