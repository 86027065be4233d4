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

// Local models used as foils for the quantum prediction:
//  - "naive": photons carry no polarization until one of them is measured, at
//    which point the partner acquires the orthogonal polarization;
//  - "lhv-sign": a shared hidden angle drawn at the source fixes every outcome
//    through the sign of cos 2(setting - angle).
// Plus the CHSH combination, which accepts any correlator.

#include <functional>
#include <optional>

#include "entangle/quantum_core.hpp"

namespace entangle {

class HiddenState {
 public:
  static HiddenState unpolarized() { return HiddenState(); }
  /// Angle is reduced into [0, pi).
  static HiddenState definite(double angle);

  bool is_definite() const { return definite_; }
  /// Only meaningful when is_definite().
  double angle() const { return angle_; }

  friend bool operator==(const HiddenState &, const HiddenState &) = default;

 private:
  HiddenState() = default;
  bool definite_ = false;
  double angle_ = 0.0;
};

/// Per-trial payload of a local model. Flags only ever go from false to true.
class LocalTrialState {
 public:
  LocalTrialState(HiddenState a, HiddenState b) : photon_a(a), photon_b(b) {}

  HiddenState photon_a;
  HiddenState photon_b;

  bool a_passed_plate() const { return a_passed_plate_; }
  bool a_measured() const { return a_measured_; }
  bool b_measured() const { return b_measured_; }
  bool measured(Channel c) const { return c == Channel::A ? a_measured_ : b_measured_; }

  void mark_plate_passed() { a_passed_plate_ = true; }
  void mark_measured(Channel c) { (c == Channel::A ? a_measured_ : b_measured_) = true; }

  HiddenState &photon(Channel c) { return c == Channel::A ? photon_a : photon_b; }

 private:
  bool a_passed_plate_ = false;
  bool a_measured_ = false;
  bool b_measured_ = false;
};

/// Shared hidden angle lambda = u * pi.
double lhv_sample(double u);

/// Hidden angles carried by photons a and b for a source angle lambda:
/// b is offset by pi/2 so that the pair is anticorrelated like the quantum source.
struct HiddenPair {
  HiddenState a;
  HiddenState b;
};
HiddenPair lhv_pair(double lambda);

/// X iff cos 2(setting - lambda) >= 0.
PolAxis lhv_outcome(double lambda, AnalyzerSetting setting);

/// Closed-form correlator of the sign model for hidden angles offset by
/// (offset_a, offset_b) from a uniform lambda: a sawtooth in the effective
/// angle difference.
double lhv_analytic_E(AnalyzerSetting alpha, AnalyzerSetting beta, double offset_a,
                      double offset_b);
ProbTable lhv_analytic_table(AnalyzerSetting alpha, AnalyzerSetting beta, double offset_a,
                             double offset_b);

/// A half-wave plate at plate_angle rotates a definite polarization by
/// 2 * plate_angle and leaves an unpolarized photon alone.
HiddenState plate_action(const HiddenState &photon, double plate_angle);

/// The plate at pi/4: Definite(t) -> Definite(t + pi/2 mod pi).
HiddenState naive_plate_action(const HiddenState &photon);

struct NaiveMeasurement {
  PolAxis outcome;
  /// Set when this was the first photon of the pair to be registered: the
  /// partner's new state, orthogonal to the registered axis.
  std::optional<HiddenState> partner_update;
};

NaiveMeasurement naive_measure(const HiddenState &photon, AnalyzerSetting setting, double u,
                               bool partner_measured);

/// Probability that naive_measure returns X (0.5 for an unpolarized photon,
/// 0 or 1 for a definite one). Written as a threshold on u.
double naive_threshold(const HiddenState &photon, AnalyzerSetting setting);

struct ChshAngles {
  AnalyzerSetting a, a_prime, b, b_prime;

  /// (0, 45, 22.5, 67.5) degrees.
  static ChshAngles canonical();
};

/// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|
struct ChshReport {
  double e_ab = 0.0;
  double e_abp = 0.0;
  double e_apb = 0.0;
  double e_apbp = 0.0;
  double s = 0.0;
  double stderr_ab = 0.0;
  double stderr_abp = 0.0;
  double stderr_apb = 0.0;
  double stderr_apbp = 0.0;
  double stderr_total = 0.0;

  /// Recomputes S from the four correlators.
  double recompute_s() const { return chsh_combination(e_ab, e_abp, e_apb, e_apbp); }
  static double chsh_combination(double e_ab, double e_abp, double e_apb, double e_apbp);

  std::string to_json() const;

  friend bool operator==(const ChshReport &, const ChshReport &) = default;
};

using Correlator = std::function<double(AnalyzerSetting, AnalyzerSetting)>;

/// Analytic CHSH evaluation; standard errors are zero. Throws InvalidModel
/// when the correlator leaves [-1, 1] or returns a non-finite value.
ChshReport chsh_S(const Correlator &correlator, const ChshAngles &angles);

}  // namespace entangle
