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

#include <random>

#include "entangle/errors.hpp"
#include "entangle/experiment.hpp"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace entangle;
using namespace entangle::kernels;
using entangle::testing::random_angle;

namespace {

ThresholdProgram random_threshold(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> p(0.0, 1.0);
  ThresholdProgram t;
  t.first = rng() % 2 ? Channel::A : Channel::B;
  // Mix in exact 0, 1 and 1/2 so the comparisons hit ties.
  auto pick = [&] {
    switch (rng() % 4) {
      case 0: return 0.0;
      case 1: return 1.0;
      case 2: return 0.5;
      default: return p(rng);
    }
  };
  t.p_first = pick();
  t.p_second_given_x = pick();
  t.p_second_given_y = pick();
  return t;
}

std::vector<SignProgram> random_sign_programs(std::mt19937_64 &rng, std::size_t count) {
  std::vector<SignProgram> out(count);
  for (auto &p : out) {
    // Include exact sign-rule boundaries.
    p.alpha = rng() % 5 == 0 ? kQuarterPi * static_cast<double>(rng() % 4) : random_angle(rng);
    p.beta = rng() % 5 == 0 ? kQuarterPi * static_cast<double>(rng() % 4) : random_angle(rng);
  }
  return out;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!avx2_available()) GTEST_SKIP() << "AVX2 not available";
  }
};

}  // namespace

TEST(Backend, Names) {
  for (auto b : {Backend::Auto, Backend::Scalar, Backend::Avx2}) EXPECT_EQ(parse_backend(backend_name(b)), b);
  EXPECT_THROW(parse_backend("neon"), InvalidArgument);
  EXPECT_EQ(resolve(Backend::Scalar), Backend::Scalar);
  EXPECT_NE(resolve(Backend::Auto), Backend::Auto);
}

TEST(Accumulator, ChshRequiresFourPrograms) {
  Accumulator acc(3, true);
  std::vector<ThresholdProgram> progs(3);
  EXPECT_THROW(run_threshold(Backend::Scalar, progs, 1, 0, 10, acc), InvalidArgument);
}

TEST(Accumulator, Merge) {
  Accumulator a(2, true), b(2, true);
  a.tallies[0] = {1, 2, 3, 4};
  b.tallies[0] = {10, 20, 30, 40};
  b.tallies[1] = {1, 0, 0, 0};
  a.chsh = {1, 0, 0, 0, 2};
  b.chsh = {0, 0, 5, 0, 0};
  a.merge(b);
  EXPECT_EQ(a.tallies[0], (Tally{11, 22, 33, 44}));
  EXPECT_EQ(a.tallies[1], (Tally{1, 0, 0, 0}));
  EXPECT_EQ(a.chsh, (ChshHistogram{1, 0, 5, 0, 2}));
}

TEST_F(KernelEquivalence, ThresholdMatchesScalar) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 60; ++rep) {
    const bool chsh = rep % 2 == 0;
    const std::size_t count = chsh ? 4 : 1 + rng() % 5;
    std::vector<ThresholdProgram> progs;
    for (std::size_t i = 0; i < count; ++i) progs.push_back(random_threshold(rng));
    const std::uint64_t seed = rng();
    const std::uint64_t begin = rng() % 1000;
    const std::uint64_t end = begin + rng() % 5000;
    Accumulator s(count, chsh), v(count, chsh);
    run_threshold(Backend::Scalar, progs, seed, begin, end, s);
    run_threshold(Backend::Avx2, progs, seed, begin, end, v);
    ASSERT_EQ(s.tallies, v.tallies) << "rep " << rep;
    ASSERT_EQ(s.chsh, v.chsh) << "rep " << rep;
  }
}

TEST_F(KernelEquivalence, SignMatchesScalar) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 60; ++rep) {
    const bool chsh = rep % 2 == 0;
    const auto progs = random_sign_programs(rng, chsh ? 4 : 1 + rng() % 5);
    SignSetup setup{rng() % 2 == 0, rng() % 3 == 0 ? kQuarterPi : random_angle(rng)};
    const std::uint64_t seed = rng();
    const std::uint64_t begin = rng() % 1000;
    const std::uint64_t end = begin + rng() % 5000;
    Accumulator s(progs.size(), chsh), v(progs.size(), chsh);
    run_sign(Backend::Scalar, setup, progs, seed, begin, end, s);
    run_sign(Backend::Avx2, setup, progs, seed, begin, end, v);
    ASSERT_EQ(s.tallies, v.tallies) << "rep " << rep;
    ASSERT_EQ(s.chsh, v.chsh) << "rep " << rep;
  }
}

TEST_F(KernelEquivalence, AcrossThirtyTwoBitTrialBoundary) {
  std::mt19937_64 rng(23);
  const std::uint64_t begin = (1ull << 32) - 37;
  const std::uint64_t end = (1ull << 32) + 53;
  std::vector<ThresholdProgram> tprogs{random_threshold(rng), random_threshold(rng), random_threshold(rng),
                                       random_threshold(rng)};
  Accumulator s(4, true), v(4, true);
  run_threshold(Backend::Scalar, tprogs, 77, begin, end, s);
  run_threshold(Backend::Avx2, tprogs, 77, begin, end, v);
  EXPECT_EQ(s.tallies, v.tallies);
  EXPECT_EQ(s.chsh, v.chsh);

  const auto sprogs = random_sign_programs(rng, 4);
  Accumulator s2(4, true), v2(4, true);
  run_sign(Backend::Scalar, {true, kQuarterPi}, sprogs, 77, begin, end, s2);
  run_sign(Backend::Avx2, {true, kQuarterPi}, sprogs, 77, begin, end, v2);
  EXPECT_EQ(s2.tallies, v2.tallies);
  EXPECT_EQ(s2.chsh, v2.chsh);
}

TEST_F(KernelEquivalence, LargeRange) {
  const std::vector<ThresholdProgram> progs{compile_threshold_program(Model::Qm, OpticalBench{})};
  Accumulator s(1), v(1);
  run_threshold(Backend::Scalar, progs, 5, 0, 1000003, s);
  run_threshold(Backend::Avx2, progs, 5, 0, 1000003, v);
  EXPECT_EQ(s.tallies, v.tallies);
}

TEST(Kernels, MatchTrialWalkPerIndex) {
  std::vector<OpticalBench> benches(4);
  benches[1].d_prism_b_m = 0.25;  // b registered before the plate
  benches[2].d_prism_b_m = 3.0;   // a registered first
  benches[3].plate_present = false;
  std::mt19937_64 rng(31);
  for (auto model : {Model::Qm, Model::Naive, Model::LhvSign}) {
    for (auto bench : benches) {
      bench.alpha = AnalyzerSetting(random_angle(rng));
      bench.beta = AnalyzerSetting(random_angle(rng));
      const std::uint64_t seed = rng();
      for (std::uint64_t i = 0; i < 300; ++i) {
        Accumulator acc(1);
        if (model == Model::LhvSign) {
          const SignProgram p{bench.alpha.radians(), bench.beta.radians()};
          run_sign(Backend::Scalar, compile_sign_setup(bench), std::span(&p, 1), seed, i, i + 1, acc);
        } else {
          const auto p = compile_threshold_program(model, bench);
          run_threshold(Backend::Scalar, std::span(&p, 1), seed, i, i + 1, acc);
        }
        const auto rec = run_trial(model, bench, seed, i);
        const auto idx = static_cast<std::size_t>(joint_index(rec.outcome_a, rec.outcome_b));
        ASSERT_EQ(acc.tallies[0][idx], 1u) << model_name(model) << " trial " << i;
      }
    }
  }
}
