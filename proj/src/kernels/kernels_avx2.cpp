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

// AVX2 variants of the trial kernels: eight Philox streams per iteration in
// 32-bit lanes, then two groups of four doubles for the outcome logic. Every
// floating-point step mirrors the scalar reference operation for operation.

#include "entangle/errors.hpp"
#include "entangle/kernels.hpp"

#include <bit>

#if defined(ENTANGLE_HAVE_AVX2_KERNELS)
#include <immintrin.h>
#endif

namespace entangle::kernels::detail {

#if defined(ENTANGLE_HAVE_AVX2_KERNELS)

#define ENTANGLE_AVX2 __attribute__((target("avx2")))

namespace {

struct Philox8 {
  __m256i w0, w1, w2, w3;
};

ENTANGLE_AVX2 inline void mulhilo(__m256i a, __m256i mul, __m256i &lo, __m256i &hi) {
  const __m256i even = _mm256_mul_epu32(a, mul);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mul);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// Lane i carries trial (trial_lo + i, trial_hi); caller guarantees no carry.
ENTANGLE_AVX2 inline Philox8 philox8(std::uint32_t trial_lo, std::uint32_t trial_hi,
                                     std::uint64_t seed) {
  __m256i c0 = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(trial_lo)),
                                _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));
  __m256i c1 = _mm256_set1_epi32(static_cast<int>(trial_hi));
  __m256i c2 = _mm256_setzero_si256();
  __m256i c3 = _mm256_setzero_si256();
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul1));
  for (int round = 0; round < Philox4x32::kRounds; ++round) {
    if (round > 0) {
      k0 += Philox4x32::kWeyl0;
      k1 += Philox4x32::kWeyl1;
    }
    __m256i lo0, hi0, lo1, hi1;
    mulhilo(c0, m0, lo0, hi0);
    mulhilo(c2, m1, lo1, hi1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi32(static_cast<int>(k0)));
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi32(static_cast<int>(k1)));
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }
  return {c0, c1, c2, c3};
}

// Uniforms from (low word, high word) pairs; `lo_group` holds lanes {0,1,4,5},
// `hi_group` lanes {2,3,6,7}.
ENTANGLE_AVX2 inline void to_unit(__m256i wlo, __m256i whi, __m256d &lo_group, __m256d &hi_group) {
  const __m256i mant_hi = _mm256_or_si256(_mm256_srli_epi32(whi, 12), _mm256_set1_epi32(0x3FF00000));
  const __m256i mant_lo = _mm256_or_si256(_mm256_slli_epi32(whi, 20), _mm256_srli_epi32(wlo, 12));
  const __m256d one = _mm256_set1_pd(1.0);
  lo_group = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_unpacklo_epi32(mant_lo, mant_hi)), one);
  hi_group = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_unpackhi_epi32(mant_lo, mant_hi)), one);
}

ENTANGLE_AVX2 inline __m256d reduce_mod_pi4(__m256d x) {
  const __m256d pi = _mm256_set1_pd(kPi);
  const __m256d q = _mm256_floor_pd(_mm256_div_pd(x, pi));
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(pi, q));
  r = _mm256_blendv_pd(r, _mm256_add_pd(r, pi), _mm256_cmp_pd(r, _mm256_setzero_pd(), _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, _mm256_sub_pd(r, pi), _mm256_cmp_pd(r, pi, _CMP_GE_OQ));
  return r;
}

// Same bits as reduce_mod_pi4 for x in (-pi, 2pi): there floor(x / pi) is -1, 0 or 1
// (or 2 just below 2pi), and each case collapses to at most one exact add or subtract.
ENTANGLE_AVX2 inline __m256d reduce_near_pi4(__m256d x) {
  const __m256d pi = _mm256_set1_pd(kPi);
  __m256d r = _mm256_blendv_pd(x, _mm256_add_pd(x, pi), _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, _mm256_sub_pd(r, pi), _mm256_cmp_pd(r, pi, _CMP_GE_OQ));
  return r;
}

// Both arguments canonical in [0, pi).
ENTANGLE_AVX2 inline int sign_rule_mask(__m256d setting, __m256d angle) {
  const __m256d d = reduce_near_pi4(_mm256_sub_pd(setting, angle));
  const __m256d x = _mm256_or_pd(_mm256_cmp_pd(d, _mm256_set1_pd(kQuarterPi), _CMP_LE_OQ),
                                 _mm256_cmp_pd(d, _mm256_set1_pd(kThreeQuarterPi), _CMP_GE_OQ));
  return _mm256_movemask_pd(x);
}

// Adds four lanes of (a, b) outcome bits to a tally.
inline void add_masks(Tally &t, unsigned ma, unsigned mb) {
  t[0] += std::popcount(ma & mb);
  t[1] += std::popcount(ma & ~mb & 0xFu);
  t[2] += std::popcount(~ma & mb & 0xFu);
  t[3] += std::popcount(~ma & ~mb & 0xFu);
}

// agree[j] has bit l set iff lane l's outcomes agree under program j.
// Histogram bin for each 4-bit agreement pattern (bit j: program j agrees).
constexpr std::array<std::uint8_t, 16> kChshBin = [] {
  std::array<std::uint8_t, 16> bins{};
  for (unsigned pattern = 0; pattern < 16; ++pattern) {
    int s = 0;
    for (std::size_t j = 0; j < 4; ++j) s += kChshWeights[j] * (((pattern >> j) & 1u) ? 1 : -1);
    bins[pattern] = static_cast<std::uint8_t>((s + 4) / 2);
  }
  return bins;
}();

inline void add_chsh(Accumulator &acc, const std::array<unsigned, 4> &agree) {
  for (unsigned lane = 0; lane < 4; ++lane) {
    const unsigned pattern = ((agree[0] >> lane) & 1u) | (((agree[1] >> lane) & 1u) << 1) |
                             (((agree[2] >> lane) & 1u) << 2) | (((agree[3] >> lane) & 1u) << 3);
    ++acc.chsh[kChshBin[pattern]];
  }
}

bool simd_block_fits(std::uint64_t t) { return (t & 0xFFFFFFFFull) <= 0xFFFFFFF8ull; }

ENTANGLE_AVX2 void threshold_group(std::span<const ThresholdProgram> programs, __m256d u0,
                                   __m256d u1, Accumulator &acc) {
  std::array<unsigned, 4> agree{};
  for (std::size_t j = 0; j < programs.size(); ++j) {
    const auto &p = programs[j];
    const __m256d fx = _mm256_cmp_pd(u0, _mm256_set1_pd(p.p_first), _CMP_LT_OQ);
    const __m256d p2 = _mm256_blendv_pd(_mm256_set1_pd(p.p_second_given_y),
                                        _mm256_set1_pd(p.p_second_given_x), fx);
    const __m256d sx = _mm256_cmp_pd(u1, p2, _CMP_LT_OQ);
    const auto m1 = static_cast<unsigned>(_mm256_movemask_pd(fx));
    const auto m2 = static_cast<unsigned>(_mm256_movemask_pd(sx));
    if (p.first == Channel::A) {
      add_masks(acc.tallies[j], m1, m2);
    } else {
      add_masks(acc.tallies[j], m2, m1);
    }
    if (j < 4) agree[j] = ~(m1 ^ m2) & 0xFu;
  }
  if (acc.track_chsh) add_chsh(acc, agree);
}

ENTANGLE_AVX2 void sign_group(const SignSetup &setup, std::span<const SignProgram> programs,
                              __m256d u0, Accumulator &acc) {
  const __m256d lambda = _mm256_mul_pd(u0, _mm256_set1_pd(kPi));
  // lambda lies in [0, pi], lambda + pi/2 in [pi/2, 3pi/2].
  __m256d a = reduce_near_pi4(lambda);
  if (setup.plate) a = reduce_mod_pi4(_mm256_add_pd(a, _mm256_set1_pd(2.0 * setup.plate_angle)));
  const __m256d b = reduce_near_pi4(_mm256_add_pd(lambda, _mm256_set1_pd(kHalfPi)));
  std::array<unsigned, 4> agree{};
  for (std::size_t j = 0; j < programs.size(); ++j) {
    const auto ma = static_cast<unsigned>(sign_rule_mask(_mm256_set1_pd(programs[j].alpha), a));
    const auto mb = static_cast<unsigned>(sign_rule_mask(_mm256_set1_pd(programs[j].beta), b));
    add_masks(acc.tallies[j], ma, mb);
    if (j < 4) agree[j] = ~(ma ^ mb) & 0xFu;
  }
  if (acc.track_chsh) add_chsh(acc, agree);
}

}  // namespace

ENTANGLE_AVX2 void threshold_avx2(std::span<const ThresholdProgram> programs, std::uint64_t seed,
                                  std::uint64_t begin, std::uint64_t end, Accumulator &acc) {
  std::uint64_t t = begin;
  while (t < end) {
    if (end - t < 8 || !simd_block_fits(t)) {
      const std::uint64_t stop = end - t < 8 ? end : t + 1;
      threshold_scalar(programs, seed, t, stop, acc);
      t = stop;
      continue;
    }
    const Philox8 w = philox8(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32), seed);
    __m256d u0_lo, u0_hi, u1_lo, u1_hi;
    to_unit(w.w0, w.w1, u0_lo, u0_hi);
    to_unit(w.w2, w.w3, u1_lo, u1_hi);
    threshold_group(programs, u0_lo, u1_lo, acc);
    threshold_group(programs, u0_hi, u1_hi, acc);
    t += 8;
  }
}

ENTANGLE_AVX2 void sign_avx2(const SignSetup &setup, std::span<const SignProgram> programs,
                             std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                             Accumulator &acc) {
  std::uint64_t t = begin;
  while (t < end) {
    if (end - t < 8 || !simd_block_fits(t)) {
      const std::uint64_t stop = end - t < 8 ? end : t + 1;
      sign_scalar(setup, programs, seed, t, stop, acc);
      t = stop;
      continue;
    }
    const Philox8 w = philox8(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32), seed);
    __m256d u0_lo, u0_hi;
    to_unit(w.w0, w.w1, u0_lo, u0_hi);
    sign_group(setup, programs, u0_lo, acc);
    sign_group(setup, programs, u0_hi, acc);
    t += 8;
  }
}

#else

void threshold_avx2(std::span<const ThresholdProgram>, std::uint64_t, std::uint64_t,
                    std::uint64_t, Accumulator &) {
  throw InvalidArgument("AVX2 kernels are not built for this target");
}

void sign_avx2(const SignSetup &, std::span<const SignProgram>, std::uint64_t, std::uint64_t,
               std::uint64_t, Accumulator &) {
  throw InvalidArgument("AVX2 kernels are not built for this target");
}

#endif

}  // namespace entangle::kernels::detail
