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

// Seeded Monte Carlo runs of the two-photon bench under any registered model.
//
// run_trial walks the event timeline with the model's own operations and is
// the semantic reference. Ensembles compile the bench into a kernel program
// and count outcomes in parallel; both paths consume the same counter-based
// uniforms (see philox.hpp) and agree trial by trial.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entangle/bench.hpp"
#include "entangle/kernels.hpp"
#include "entangle/local_models.hpp"
#include "entangle/quantum_core.hpp"

namespace entangle {

struct EngineOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  kernels::Backend backend = kernels::Backend::Auto;
};

struct TrialRecord {
  PolAxis outcome_a;
  PolAxis outcome_b;
  bool b_before_plate;
  std::uint64_t trial_index;
  Model model;

  friend bool operator==(const TrialRecord &, const TrialRecord &) = default;
};

TrialRecord run_trial(Model model, const OpticalBench &bench, std::uint64_t master_seed,
                      std::uint64_t trial_index);
TrialRecord run_trial(std::string_view model, const OpticalBench &bench,
                      std::uint64_t master_seed, std::uint64_t trial_index);

/// Trials [0, n) through run_trial, in index order.
std::vector<TrialRecord> run_trials(Model model, const OpticalBench &bench, std::uint64_t n,
                                    std::uint64_t master_seed);

/// `trial,outcome_a,outcome_b,b_before_plate` then one row per trial.
std::string trials_to_csv(std::span<const TrialRecord> trials);

struct EnsembleStats {
  std::uint64_t n = 0;
  std::uint64_t n_xx = 0, n_xy = 0, n_yx = 0, n_yy = 0;
  double e_hat = 0.0;
  double stderr_e = 0.0;  // sqrt((1 - e_hat^2) / n)
  Marginal marginal_a;
  Marginal marginal_b;

  static EnsembleStats from_tally(const kernels::Tally &tally);
  std::uint64_t count(PolAxis a, PolAxis b) const;
  double frequency(PolAxis a, PolAxis b) const;
  std::string to_json() const;

  friend bool operator==(const EnsembleStats &, const EnsembleStats &) = default;
};

EnsembleStats run_ensemble(Model model, const OpticalBench &bench, std::uint64_t n,
                           std::uint64_t master_seed, const EngineOptions &opts = {});
EnsembleStats run_ensemble(std::string_view model, const OpticalBench &bench, std::uint64_t n,
                           std::uint64_t master_seed, const EngineOptions &opts = {});

/// Kernel program of a threshold model ("qm" or "naive"): branch probabilities
/// obtained by walking the timeline through both outcomes of the first detection.
kernels::ThresholdProgram compile_threshold_program(Model model, const OpticalBench &bench);
kernels::SignSetup compile_sign_setup(const OpticalBench &bench);

/// Exact joint table predicted by a model on a bench. "qm" and "naive" sum
/// over the collapse branches in timeline order; "lhv-sign" integrates the
/// sign rule over the hidden angle in closed form.
ProbTable analytic_table(Model model, const OpticalBench &bench);
double analytic_E(Model model, const OpticalBench &bench);

struct OrderInvarianceReport {
  Model model;
  EnsembleStats early;  // photon b registered before photon a reaches the plate
  EnsembleStats late;
  ProbTable analytic_early;
  ProbTable analytic_late;
  double e_analytic_early = 0.0;
  double e_analytic_late = 0.0;
  double delta_e = 0.0;  // late.e_hat - early.e_hat
  double stderr_delta_e = 0.0;
  std::array<double, 4> frequency_diff{};   // late - early, [XX, XY, YX, YY]
  std::array<double, 4> combined_stderr{};
  bool same_distribution = false;

  std::string to_json() const;
};

/// Verdict threshold in combined standard errors.
inline constexpr double kSameDistributionSigmas = 4.0;

/// Runs both benches (early with master_seed, late with derive_seed(master_seed, 1)).
/// Throws InvalidComparison unless the benches differ only in d_prism_b and
/// sit on opposite sides of the plate-traversal time.
OrderInvarianceReport order_invariance_report(Model model, const OpticalBench &bench_early_b,
                                              const OpticalBench &bench_late_b, std::uint64_t n,
                                              std::uint64_t master_seed,
                                              const EngineOptions &opts = {});

/// Four ensembles, one per setting pair, on `bench` with its analyzer angles
/// replaced. The four share the trial uniforms, so every per-term E_hat equals
/// run_ensemble with the same seed, and stderr_total is the standard error of
/// the per-trial CHSH combination (which accounts for the shared draws).
ChshReport chsh_experiment(Model model, const ChshAngles &angles, std::uint64_t n_per_setting,
                           std::uint64_t master_seed, const OpticalBench &bench = {},
                           const EngineOptions &opts = {});
ChshReport chsh_experiment(std::string_view model, const ChshAngles &angles,
                           std::uint64_t n_per_setting, std::uint64_t master_seed,
                           const OpticalBench &bench = {}, const EngineOptions &opts = {});

/// chsh_S over analytic_E for the model on `bench`.
ChshReport chsh_analytic(Model model, const ChshAngles &angles, const OpticalBench &bench = {});

OpticalBench with_settings(OpticalBench bench, AnalyzerSetting alpha, AnalyzerSetting beta);

}  // namespace entangle
