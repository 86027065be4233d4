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

#include <cmath>
#include <numbers>
#include <random>

#include "entangle/angles.hpp"
#include "entangle/errors.hpp"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace entangle;
using entangle::testing::random_angle;
using entangle::testing::random_state;
using entangle::testing::random_unitary;

namespace {

const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

TwoPhotonState correlated_pair() {
  return apply_element(make_anticorrelated_pair(), Channel::A, hwp_jones(kQuarterPi));
}

// Brute-force oracle: p_ij = <psi| (P_i (x) P_j) |psi> with the 4x4 Kronecker
// projector written out explicitly from cos/sin of the analyzer angles.
ProbTable oracle_joint(const TwoPhotonState &psi, double alpha, double beta) {
  const double ca = std::cos(alpha), sa = std::sin(alpha), cb = std::cos(beta), sb = std::sin(beta);
  const double va[2][2] = {{ca, sa}, {-sa, ca}};
  const double vb[2][2] = {{cb, sb}, {-sb, cb}};
  ProbTable t;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double proj[4][4];
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          proj[r][c] = va[i][r / 2] * va[i][c / 2] * vb[j][r % 2] * vb[j][c % 2];
        }
      }
      Complex acc = 0.0;
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) acc += std::conj(psi.amps()[r]) * proj[r][c] * psi.amps()[c];
      }
      t.p[2 * i + j] = acc.real();
    }
  }
  return t;
}

}  // namespace

TEST(AnalyzerSetting, ReducesModPi) {
  EXPECT_DOUBLE_EQ(AnalyzerSetting(kPi + 0.25).radians(), 0.25);
  EXPECT_DOUBLE_EQ(AnalyzerSetting(-0.25).radians(), kPi - 0.25);
  EXPECT_EQ(AnalyzerSetting(kPi).radians(), 0.0);
  EXPECT_NEAR(AnalyzerSetting::from_degrees(190.0).degrees(), 10.0, 1e-12);
  EXPECT_THROW(AnalyzerSetting(std::nan("")), InvalidArgument);
  EXPECT_THROW(AnalyzerSetting::from_degrees(INFINITY), InvalidArgument);
}

TEST(MakeAnticorrelatedPair, Amplitudes) {
  const auto psi = make_anticorrelated_pair();
  const std::array<double, 4> expected{0.0, 0.7071067811865476, 0.7071067811865476, 0.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(psi.amps()[i].real(), expected[i]);
    EXPECT_EQ(psi.amps()[i].imag(), 0.0);
  }
  EXPECT_NEAR(psi.norm_squared(), 1.0, kExactTol);
  const auto t = joint_probabilities(psi, AnalyzerSetting(0.0), AnalyzerSetting(0.0));
  EXPECT_NEAR(t.p[0], 0.0, kExactTol);
  EXPECT_NEAR(t.p[1], 0.5, kExactTol);
  EXPECT_NEAR(t.p[2], 0.5, kExactTol);
  EXPECT_NEAR(t.p[3], 0.0, kExactTol);
}

TEST(HwpJones, Examples) {
  EXPECT_LE(hwp_jones(kQuarterPi).max_abs_diff({0.0, 1.0, 1.0, 0.0}), 1e-15);
  EXPECT_LE(hwp_jones(0.0).max_abs_diff({1.0, 0.0, 0.0, -1.0}), 0.0);
  const auto m = hwp_jones(kPi / 8.0);
  EXPECT_LE(m.max_abs_diff({kHalfSqrt2, kHalfSqrt2, kHalfSqrt2, -kHalfSqrt2}), 1e-15);
  EXPECT_TRUE(m.is_unitary());
  EXPECT_THROW(hwp_jones(std::nan("")), InvalidArgument);
}

TEST(HwpJones, UnitaryAndInvolutiveForAllAngles) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto m = hwp_jones(random_angle(rng, -10.0, 10.0));
    EXPECT_TRUE(m.is_unitary());
    EXPECT_LE((m * m).max_abs_diff(JonesMatrix::identity()), kExactTol);
  }
}

TEST(ApplyElement, HalfWavePlateTurnsAnticorrelationIntoCorrelation) {
  const auto psi = correlated_pair();
  const auto expected = TwoPhotonState::from_amplitudes({kHalfSqrt2, 0.0, 0.0, kHalfSqrt2});
  EXPECT_TRUE(states_equal_up_to_phase(psi, expected, kExactTol));
  EXPECT_NEAR(psi.norm_squared(), 1.0, kExactTol);
}

TEST(ApplyElement, IdentityAndDoublePlate) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(rng);
    for (auto ch : {Channel::A, Channel::B}) {
      EXPECT_EQ(apply_element(s, ch, JonesMatrix::identity()), s);
      const auto twice = apply_element(apply_element(s, ch, hwp_jones(kQuarterPi)), ch, hwp_jones(kQuarterPi));
      EXPECT_TRUE(states_equal_up_to_phase(twice, s, kExactTol));
    }
  }
}

TEST(ApplyElement, ActsOnTheRequestedChannelOnly) {
  // Plate on b maps |x>_a|y>_b to |x>_a|x>_b.
  const auto s = apply_element(TwoPhotonState::product(PolAxis::X, PolAxis::Y), Channel::B, hwp_jones(kQuarterPi));
  EXPECT_TRUE(states_equal_up_to_phase(s, TwoPhotonState::product(PolAxis::X, PolAxis::X), kExactTol));
}

TEST(ApplyElement, RejectsNonUnitary) {
  EXPECT_THROW(apply_element(make_anticorrelated_pair(), Channel::A, {1.0, 1.0, 0.0, 1.0}), InvalidArgument);
}

TEST(ApplyElement, PreservesNormalizationForRandomInputs) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10000; ++i) {
    const auto s = apply_element(random_state(rng), i % 2 ? Channel::A : Channel::B, random_unitary(rng));
    ASSERT_NEAR(s.norm_squared(), 1.0, kExactTol);
  }
}

TEST(AnalyzerBasis, Examples) {
  auto near = [](const JonesVector &v, double x, double y) {
    return std::abs(v[0] - Complex(x)) < 1e-15 && std::abs(v[1] - Complex(y)) < 1e-15;
  };
  auto b0 = analyzer_basis(AnalyzerSetting(0.0));
  EXPECT_TRUE(near(b0.x, 1.0, 0.0));
  EXPECT_TRUE(near(b0.y, 0.0, 1.0));
  auto b90 = analyzer_basis(AnalyzerSetting(kHalfPi));
  EXPECT_TRUE(near(b90.x, 0.0, 1.0));
  EXPECT_TRUE(near(b90.y, -1.0, 0.0));
  auto b45 = analyzer_basis(AnalyzerSetting(kQuarterPi));
  EXPECT_TRUE(near(b45.x, kHalfSqrt2, kHalfSqrt2));
  EXPECT_TRUE(near(b45.y, -kHalfSqrt2, kHalfSqrt2));
}

TEST(AnalyzerBasis, OrthonormalForAllSettings) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto b = analyzer_basis(AnalyzerSetting(random_angle(rng)));
    const Complex xx = std::conj(b.x[0]) * b.x[0] + std::conj(b.x[1]) * b.x[1];
    const Complex yy = std::conj(b.y[0]) * b.y[0] + std::conj(b.y[1]) * b.y[1];
    const Complex xy = std::conj(b.x[0]) * b.y[0] + std::conj(b.x[1]) * b.y[1];
    EXPECT_NEAR(std::abs(xx - 1.0), 0.0, kExactTol);
    EXPECT_NEAR(std::abs(yy - 1.0), 0.0, kExactTol);
    EXPECT_NEAR(std::abs(xy), 0.0, kExactTol);
  }
}

TEST(JointProbabilities, Examples) {
  const AnalyzerSetting zero(0.0);
  const auto t2 = joint_probabilities(correlated_pair(), zero, zero);
  const std::array<double, 4> e2{0.5, 0.0, 0.0, 0.5};
  const auto t1 = joint_probabilities(make_anticorrelated_pair(), zero, zero);
  const std::array<double, 4> e1{0.0, 0.5, 0.5, 0.0};
  // Frozen from oracle_joint(correlated_pair(), 0, pi/4).
  const auto t3 = joint_probabilities(correlated_pair(), zero, AnalyzerSetting(kQuarterPi));
  const auto o3 = oracle_joint(correlated_pair(), 0.0, kQuarterPi);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(t2.p[i], e2[i], kExactTol);
    EXPECT_NEAR(t1.p[i], e1[i], kExactTol);
    EXPECT_NEAR(o3.p[i], 0.25, kExactTol);
    EXPECT_NEAR(t3.p[i], 0.25, kExactTol);
  }
}

TEST(JointProbabilities, MatchesKroneckerOracleAndSumsToOne) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_state(rng);
    const double a = random_angle(rng), b = random_angle(rng);
    const auto t = joint_probabilities(s, AnalyzerSetting(a), AnalyzerSetting(b));
    const auto o = oracle_joint(s, a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      ASSERT_GE(t.p[k], 0.0);
      ASSERT_LE(t.p[k], 1.0 + kExactTol);
      ASSERT_NEAR(t.p[k], o.p[k], kExactTol);
      sum += t.p[k];
    }
    ASSERT_NEAR(sum, 1.0, kExactTol);
  }
}

TEST(Marginal, Examples) {
  for (double a : {0.0, 0.3, 1.1, 2.9}) {
    const auto m = marginal(correlated_pair(), Channel::A, AnalyzerSetting(a));
    EXPECT_NEAR(m.p_x, 0.5, kExactTol);
    EXPECT_NEAR(m.p_y, 0.5, kExactTol);
  }
  const auto m1 = marginal(TwoPhotonState::product(PolAxis::X, PolAxis::Y), Channel::A, AnalyzerSetting(0.0));
  EXPECT_NEAR(m1.p_x, 1.0, kExactTol);
  EXPECT_NEAR(m1.p_y, 0.0, kExactTol);
  const auto m2 = marginal(make_anticorrelated_pair(), Channel::B, AnalyzerSetting(kPi / 3.0));
  EXPECT_NEAR(m2.p_x, 0.5, kExactTol);
  EXPECT_NEAR(m2.p_y, 0.5, kExactTol);
}

TEST(Marginal, NoSignalingAcrossRemoteSettings) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_state(rng);
    const AnalyzerSetting local(random_angle(rng));
    const auto ref_a = marginal(s, Channel::A, local);
    const auto ref_b = marginal(s, Channel::B, local);
    for (int k = 0; k < 100; ++k) {
      const AnalyzerSetting remote(kPi * k / 100.0);
      const auto ta = joint_probabilities(s, local, remote);
      const auto tb = joint_probabilities(s, remote, local);
      ASSERT_NEAR(ta.p[0] + ta.p[1], ref_a.p_x, kExactTol);
      ASSERT_NEAR(tb.p[0] + tb.p[2], ref_b.p_x, kExactTol);
    }
  }
}

TEST(MeasureChannel, CollapseOfCorrelatedPair) {
  const AnalyzerSetting zero(0.0);
  const auto y = measure_channel(correlated_pair(), Channel::B, zero, 0.9);
  EXPECT_EQ(y.outcome, PolAxis::Y);
  EXPECT_NEAR(y.probability, 0.5, kExactTol);
  EXPECT_TRUE(states_equal_up_to_phase(y.collapsed, TwoPhotonState::product(PolAxis::Y, PolAxis::Y), kExactTol));

  const auto x = measure_channel(correlated_pair(), Channel::B, zero, 0.1);
  EXPECT_EQ(x.outcome, PolAxis::X);
  EXPECT_TRUE(states_equal_up_to_phase(x.collapsed, TwoPhotonState::product(PolAxis::X, PolAxis::X), kExactTol));

  for (double u : {0.0, 0.3, 0.999}) {
    const auto again = measure_channel(y.collapsed, Channel::B, zero, u);
    EXPECT_EQ(again.outcome, PolAxis::Y);
    EXPECT_NEAR(again.probability, 1.0, kExactTol);
  }
}

TEST(MeasureChannel, TieAtThresholdSelectsY) {
  const double p_x = marginal(correlated_pair(), Channel::A, AnalyzerSetting(0.0)).p_x;
  EXPECT_NEAR(p_x, 0.5, kExactTol);
  EXPECT_EQ(measure_channel(correlated_pair(), Channel::A, AnalyzerSetting(0.0), p_x).outcome, PolAxis::Y);
  EXPECT_EQ(measure_channel(correlated_pair(), Channel::A, AnalyzerSetting(0.0), std::nextafter(p_x, 0.0)).outcome,
            PolAxis::X);
}

TEST(MeasureChannel, NeverSelectsAVanishingBranch) {
  // p_x = 1 up to rounding; every u in [0, 1) must give X.
  const auto s = TwoPhotonState::product(PolAxis::X, PolAxis::X);
  const auto r = measure_channel(s, Channel::A, AnalyzerSetting(1e-9), std::nextafter(1.0, 0.0));
  EXPECT_EQ(r.outcome, PolAxis::X);
  const auto r2 = measure_channel(s, Channel::A, AnalyzerSetting(kHalfPi), 0.0);
  EXPECT_EQ(r2.outcome, PolAxis::Y);
}

TEST(MeasureChannel, NormalizationAndProbabilityConsistency) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_state(rng);
    const auto ch = i % 2 ? Channel::A : Channel::B;
    const AnalyzerSetting set(random_angle(rng));
    const auto r = measure_channel(s, ch, set, unit(rng));
    const auto m = marginal(s, ch, set);
    ASSERT_NEAR(r.collapsed.norm_squared(), 1.0, kExactTol);
    ASSERT_NEAR(r.probability, r.outcome == PolAxis::X ? m.p_x : m.p_y, kExactTol);
    ASSERT_GT(r.probability, 0.0);
  }
}

TEST(MeasureChannel, SequentialMeasurementReproducesJointTableInEitherOrder) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_state(rng);
    const AnalyzerSetting alpha(random_angle(rng)), beta(random_angle(rng));
    const auto joint = joint_probabilities(s, alpha, beta);
    for (auto first : {Channel::A, Channel::B}) {
      const auto set1 = first == Channel::A ? alpha : beta;
      const auto set2 = first == Channel::A ? beta : alpha;
      const double thr = branch_threshold(s, first, set1);
      for (auto o1 : {PolAxis::X, PolAxis::Y}) {
        if ((o1 == PolAxis::X && thr == 0.0) || (o1 == PolAxis::Y && thr == 1.0)) continue;
        const auto r1 = measure_channel(s, first, set1, o1 == PolAxis::X ? 0.0 : thr);
        ASSERT_EQ(r1.outcome, o1);
        const auto m2 = marginal(r1.collapsed, other(first), set2);
        for (auto o2 : {PolAxis::X, PolAxis::Y}) {
          const double p = r1.probability * (o2 == PolAxis::X ? m2.p_x : m2.p_y);
          const auto a = first == Channel::A ? o1 : o2;
          const auto b = first == Channel::A ? o2 : o1;
          ASSERT_NEAR(p, joint.at(a, b), kExactTol);
        }
      }
    }
  }
}

TEST(CorrelationE, Examples) {
  EXPECT_NEAR(correlation_E(correlated_pair(), AnalyzerSetting(0.7), AnalyzerSetting(0.7)), 1.0, kExactTol);
  EXPECT_NEAR(correlation_E(make_anticorrelated_pair(), AnalyzerSetting(0.0), AnalyzerSetting(0.0)), -1.0, kExactTol);
  // Frozen from the Kronecker oracle at alpha - beta = pi/8.
  const auto o = oracle_joint(correlated_pair(), kPi / 8.0, 0.0);
  const double oracle_e = o.p[0] + o.p[3] - o.p[1] - o.p[2];
  EXPECT_NEAR(oracle_e, 0.70710678118654752, kExactTol);
  EXPECT_NEAR(correlation_E(correlated_pair(), AnalyzerSetting(kPi / 8.0), AnalyzerSetting(0.0)),
              0.70710678118654752, kExactTol);
}

TEST(CorrelationE, ClosedFormsOnGrid) {
  const auto s1 = make_anticorrelated_pair();
  const auto s2 = correlated_pair();
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double a = kPi * i / 50.0, b = kPi * j / 50.0;
      ASSERT_NEAR(correlation_E(s2, AnalyzerSetting(a), AnalyzerSetting(b)), std::cos(2.0 * (a - b)), kExactTol);
      ASSERT_NEAR(correlation_E(s1, AnalyzerSetting(a), AnalyzerSetting(b)), -std::cos(2.0 * (a + b)), kExactTol);
    }
  }
}

TEST(StatesEqualUpToPhase, Examples) {
  std::mt19937_64 rng(37);
  const auto psi = random_state(rng);
  EXPECT_TRUE(states_equal_up_to_phase(psi, psi, kExactTol));
  EXPECT_TRUE(states_equal_up_to_phase(psi, -psi, kExactTol));
  EXPECT_FALSE(states_equal_up_to_phase(make_anticorrelated_pair(), correlated_pair(), kExactTol));
  EXPECT_NEAR(std::abs(inner_product(make_anticorrelated_pair(), correlated_pair())), 0.0, kExactTol);
}

TEST(TwoPhotonState, RejectsUnnormalizedOrNonFinite) {
  EXPECT_THROW(TwoPhotonState::from_amplitudes({1.0, 1.0, 0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(TwoPhotonState::from_amplitudes({Complex(std::nan(""), 0.0), 0.0, 0.0, 0.0}), InvalidArgument);
}

TEST(TwoPhotonState, JsonRoundTripIsBitExact) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_state(rng);
    ASSERT_EQ(TwoPhotonState::from_json(s.to_json()), s);
  }
  EXPECT_EQ(make_anticorrelated_pair().to_json(),
            "{\"amps\": [[0, 0], [0.70710678118654757, 0], [0.70710678118654757, 0], [0, 0]]}");
}

TEST(TwoPhotonState, JsonRejectsMalformedInput) {
  EXPECT_THROW(TwoPhotonState::from_json("{"), InvalidArgument);
  EXPECT_THROW(TwoPhotonState::from_json("{\"amps\": [[1, 0]]}"), InvalidArgument);
  EXPECT_THROW(TwoPhotonState::from_json("{\"amps\": [[1, 0], [0, 0], [0, 0], [0, \"x\"]]}"), InvalidArgument);
  EXPECT_THROW(TwoPhotonState::from_json("{\"amps\": [[1, 0], [1, 0], [0, 0], [0, 0]]}"), InvalidArgument);
}
