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

#include "entangle/local_models.hpp"

#include <cmath>

#include <fmt/format.h>

#include "entangle/angles.hpp"
#include "entangle/errors.hpp"

namespace entangle {

HiddenState HiddenState::definite(double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("hidden angle must be finite");
  HiddenState h;
  h.definite_ = true;
  h.angle_ = reduce_mod_pi(angle);
  return h;
}

double lhv_sample(double u) { return u * kPi; }

HiddenPair lhv_pair(double lambda) {
  return {HiddenState::definite(lambda), HiddenState::definite(lambda + kHalfPi)};
}

PolAxis lhv_outcome(double lambda, AnalyzerSetting setting) {
  return sign_rule_is_x(setting.radians(), lambda) ? PolAxis::X : PolAxis::Y;
}

namespace {

// |delta| with delta the effective analyzer offset folded into [-pi/2, pi/2].
double folded_offset(AnalyzerSetting alpha, AnalyzerSetting beta, double offset_a,
                     double offset_b) {
  const double r = reduce_mod_pi((alpha.radians() - offset_a) - (beta.radians() - offset_b));
  return std::min(r, kPi - r);
}

}  // namespace

double lhv_analytic_E(AnalyzerSetting alpha, AnalyzerSetting beta, double offset_a,
                      double offset_b) {
  return 1.0 - 4.0 * folded_offset(alpha, beta, offset_a, offset_b) / kPi;
}

ProbTable lhv_analytic_table(AnalyzerSetting alpha, AnalyzerSetting beta, double offset_a,
                             double offset_b) {
  const double d = folded_offset(alpha, beta, offset_a, offset_b) / kPi;
  ProbTable t;
  t.p = {0.5 - d, d, d, 0.5 - d};
  return t;
}

HiddenState plate_action(const HiddenState &photon, double plate_angle) {
  if (!photon.is_definite()) return photon;
  return HiddenState::definite(photon.angle() + 2.0 * plate_angle);
}

HiddenState naive_plate_action(const HiddenState &photon) {
  return plate_action(photon, kQuarterPi);
}

double naive_threshold(const HiddenState &photon, AnalyzerSetting setting) {
  if (!photon.is_definite()) return 0.5;
  return sign_rule_is_x(setting.radians(), photon.angle()) ? 1.0 : 0.0;
}

NaiveMeasurement naive_measure(const HiddenState &photon, AnalyzerSetting setting, double u,
                               bool partner_measured) {
  NaiveMeasurement m{u < naive_threshold(photon, setting) ? PolAxis::X : PolAxis::Y, {}};
  if (!partner_measured) {
    // Registered axis is the setting for X, setting + pi/2 for Y; the partner
    // takes the axis orthogonal to it.
    const double registered = setting.radians() + (m.outcome == PolAxis::X ? 0.0 : kHalfPi);
    m.partner_update = HiddenState::definite(registered + kHalfPi);
  }
  return m;
}

ChshAngles ChshAngles::canonical() {
  return {AnalyzerSetting::from_degrees(0.0), AnalyzerSetting::from_degrees(45.0),
          AnalyzerSetting::from_degrees(22.5), AnalyzerSetting::from_degrees(67.5)};
}

double ChshReport::chsh_combination(double e_ab, double e_abp, double e_apb, double e_apbp) {
  return std::abs(e_ab - e_abp + e_apb + e_apbp);
}

std::string ChshReport::to_json() const {
  return fmt::format(
      "{{\"e_ab\": {:.17g}, \"e_abp\": {:.17g}, \"e_apb\": {:.17g}, \"e_apbp\": {:.17g}, "
      "\"s\": {:.17g}, \"stderr_total\": {:.17g}}}",
      e_ab, e_abp, e_apb, e_apbp, s, stderr_total);
}

ChshReport chsh_S(const Correlator &correlator, const ChshAngles &angles) {
  auto eval = [&](AnalyzerSetting x, AnalyzerSetting y) {
    const double e = correlator(x, y);
    if (!std::isfinite(e) || std::abs(e) > 1.0 + kExactTol) {
      throw InvalidModel(fmt::format("correlator returned {} outside [-1, 1]", e));
    }
    return e;
  };
  ChshReport r;
  r.e_ab = eval(angles.a, angles.b);
  r.e_abp = eval(angles.a, angles.b_prime);
  r.e_apb = eval(angles.a_prime, angles.b);
  r.e_apbp = eval(angles.a_prime, angles.b_prime);
  r.s = r.recompute_s();
  return r;
}

}  // namespace entangle
