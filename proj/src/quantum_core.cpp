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

#include "entangle/quantum_core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "entangle/angles.hpp"
#include "entangle/errors.hpp"

namespace entangle {

namespace {

constexpr double kSnap = 1e-15;
constexpr std::array<PolAxis, 2> kAxes{PolAxis::X, PolAxis::Y};

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

// <port_a (x) port_b | psi>
Complex project_amplitude(const TwoPhotonState::Amplitudes &psi, const JonesVector &va,
                          const JonesVector &vb) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t l = 0; l < 2; ++l) {
      acc += std::conj(va[k]) * std::conj(vb[l]) * psi[2 * k + l];
    }
  }
  return acc;
}

}  // namespace

AnalyzerSetting::AnalyzerSetting(double radians) {
  if (!std::isfinite(radians)) throw InvalidArgument("analyzer angle must be finite");
  radians_ = reduce_mod_pi(radians);
}

AnalyzerSetting AnalyzerSetting::from_degrees(double degrees) {
  if (!std::isfinite(degrees)) throw InvalidArgument("analyzer angle must be finite");
  return AnalyzerSetting(degrees_to_radians(degrees));
}

double AnalyzerSetting::degrees() const { return radians_to_degrees(radians_); }

JonesMatrix JonesMatrix::operator*(const JonesMatrix &rhs) const {
  JonesMatrix out;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      out.m_[2 * r + c] = (*this)(r, 0) * rhs(0, c) + (*this)(r, 1) * rhs(1, c);
    }
  }
  return out;
}

JonesMatrix JonesMatrix::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

double JonesMatrix::max_abs_diff(const JonesMatrix &other) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(m_[i] - other.m_[i]));
  return worst;
}

bool JonesMatrix::is_unitary(double tol) const {
  for (const auto &c : m_) {
    if (!finite(c)) return false;
  }
  return ((*this) * adjoint()).max_abs_diff(identity()) <= tol;
}

TwoPhotonState TwoPhotonState::from_amplitudes(const Amplitudes &amps) {
  for (const auto &c : amps) {
    if (!finite(c)) throw InvalidArgument("state amplitude is not finite");
  }
  TwoPhotonState s(amps);
  if (std::abs(s.norm_squared() - 1.0) > kExactTol) {
    throw InvalidArgument(fmt::format("state is not normalized (norm^2 = {:.17g})", s.norm_squared()));
  }
  return s;
}

TwoPhotonState TwoPhotonState::product(PolAxis a, PolAxis b) {
  Amplitudes amps{};
  amps[joint_index(a, b)] = 1.0;
  return TwoPhotonState(amps);
}

TwoPhotonState TwoPhotonState::product(const JonesVector &a, const JonesVector &b) {
  Amplitudes amps{};
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t l = 0; l < 2; ++l) amps[2 * k + l] = a[k] * b[l];
  }
  return from_amplitudes(amps);
}

double TwoPhotonState::norm_squared() const {
  double acc = 0.0;
  for (const auto &c : amps_) acc += std::norm(c);
  return acc;
}

TwoPhotonState TwoPhotonState::operator-() const {
  Amplitudes neg;
  std::transform(amps_.begin(), amps_.end(), neg.begin(), [](Complex c) { return -c; });
  return TwoPhotonState(neg);
}

std::string TwoPhotonState::to_json() const {
  std::string out = "{\"amps\": [";
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("[{:.17g}, {:.17g}]", amps_[i].real(), amps_[i].imag());
  }
  out += "]}";
  return out;
}

TwoPhotonState TwoPhotonState::from_json(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidArgument(std::string("state JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("amps") || !doc["amps"].is_array() ||
      doc["amps"].size() != 4) {
    throw InvalidArgument("state JSON must hold \"amps\": an array of 4 [re, im] pairs");
  }
  Amplitudes amps;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto &pair = doc["amps"][i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw InvalidArgument("state JSON amplitude must be a [re, im] pair of numbers");
    }
    amps[i] = {pair[0].get<double>(), pair[1].get<double>()};
  }
  return from_amplitudes(amps);
}

TwoPhotonState make_anticorrelated_pair() {
  const double h = std::sqrt(0.5);
  return TwoPhotonState::from_amplitudes({0.0, h, h, 0.0});
}

JonesMatrix hwp_jones(double plate_angle) {
  if (!std::isfinite(plate_angle)) throw InvalidArgument("plate angle must be finite");
  const double c = std::cos(2.0 * plate_angle);
  const double s = std::sin(2.0 * plate_angle);
  return {c, s, s, -c};
}

TwoPhotonState apply_element(const TwoPhotonState &state, Channel channel, const JonesMatrix &j) {
  if (!j.is_unitary()) throw InvalidArgument("Jones matrix is not unitary");
  const auto &in = state.amps();
  TwoPhotonState::Amplitudes out{};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        acc += channel == Channel::A ? j(a, k) * in[2 * k + b] : j(b, k) * in[2 * a + k];
      }
      out[2 * a + b] = acc;
    }
  }
  return TwoPhotonState::from_amplitudes(out);
}

AnalyzerBasis analyzer_basis(AnalyzerSetting setting) {
  const double c = std::cos(setting.radians());
  const double s = std::sin(setting.radians());
  return {{c, s}, {-s, c}};
}

ProbTable joint_probabilities(const TwoPhotonState &state, AnalyzerSetting alpha,
                              AnalyzerSetting beta) {
  const auto ba = analyzer_basis(alpha);
  const auto bb = analyzer_basis(beta);
  ProbTable t;
  for (auto a : kAxes) {
    for (auto b : kAxes) {
      t.p[joint_index(a, b)] = std::norm(project_amplitude(state.amps(), ba.port(a), bb.port(b)));
    }
  }
  return t;
}

Marginal marginal(const TwoPhotonState &state, Channel channel, AnalyzerSetting setting) {
  const AnalyzerSetting unrotated;
  const auto t = channel == Channel::A ? joint_probabilities(state, setting, unrotated)
                                       : joint_probabilities(state, unrotated, setting);
  if (channel == Channel::A) {
    return {t.at(PolAxis::X, PolAxis::X) + t.at(PolAxis::X, PolAxis::Y),
            t.at(PolAxis::Y, PolAxis::X) + t.at(PolAxis::Y, PolAxis::Y)};
  }
  return {t.at(PolAxis::X, PolAxis::X) + t.at(PolAxis::Y, PolAxis::X),
          t.at(PolAxis::X, PolAxis::Y) + t.at(PolAxis::Y, PolAxis::Y)};
}

double branch_threshold(const TwoPhotonState &state, Channel channel, AnalyzerSetting setting) {
  const double p = marginal(state, channel, setting).p_x;
  if (p < kSnap) return 0.0;
  if (p > 1.0 - kSnap) return 1.0;
  return p;
}

MeasurementResult measure_channel(const TwoPhotonState &state, Channel channel,
                                  AnalyzerSetting setting, double u) {
  const Marginal m = marginal(state, channel, setting);
  const double threshold = branch_threshold(state, channel, setting);
  const PolAxis outcome = u < threshold ? PolAxis::X : PolAxis::Y;
  const JonesVector v = analyzer_basis(setting).port(outcome);

  // (|v><v| (x) I) psi or (I (x) |v><v|) psi
  const auto &in = state.amps();
  TwoPhotonState::Amplitudes out{};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      Complex overlap = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        overlap += channel == Channel::A ? std::conj(v[k]) * in[2 * k + b]
                                         : std::conj(v[k]) * in[2 * a + k];
      }
      out[2 * a + b] = (channel == Channel::A ? v[a] : v[b]) * overlap;
    }
  }
  double norm2 = 0.0;
  for (const auto &c : out) norm2 += std::norm(c);
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto &c : out) c *= scale;

  return {outcome, TwoPhotonState::from_amplitudes(out), outcome == PolAxis::X ? m.p_x : m.p_y};
}

double correlation_E(const TwoPhotonState &state, AnalyzerSetting alpha, AnalyzerSetting beta) {
  const auto t = joint_probabilities(state, alpha, beta);
  return t.at(PolAxis::X, PolAxis::X) + t.at(PolAxis::Y, PolAxis::Y) -
         t.at(PolAxis::X, PolAxis::Y) - t.at(PolAxis::Y, PolAxis::X);
}

Complex inner_product(const TwoPhotonState &bra, const TwoPhotonState &ket) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += std::conj(bra.amps()[i]) * ket.amps()[i];
  return acc;
}

bool states_equal_up_to_phase(const TwoPhotonState &s1, const TwoPhotonState &s2, double tol) {
  return std::abs(inner_product(s1, s2)) >= 1.0 - tol;
}

}  // namespace entangle
