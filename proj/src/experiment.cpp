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

#include "entangle/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "entangle/errors.hpp"
#include "entangle/philox.hpp"

namespace entangle {

namespace {

constexpr std::uint64_t kChunkTrials = 1u << 16;

AnalyzerSetting setting_for(const OpticalBench &bench, Channel c) {
  return c == Channel::A ? bench.alpha : bench.beta;
}

// Timeline walkers. Each exposes plate(), threshold(channel) (probability of
// X as a threshold on u) and detect(channel, u).

class QmWalk {
 public:
  explicit QmWalk(const OpticalBench &bench) : bench_(&bench), state_(make_anticorrelated_pair()) {}

  void plate() { state_ = apply_element(state_, Channel::A, hwp_jones(bench_->plate_angle)); }
  double threshold(Channel c) const { return branch_threshold(state_, c, setting_for(*bench_, c)); }
  PolAxis detect(Channel c, double u) {
    auto r = measure_channel(state_, c, setting_for(*bench_, c), u);
    state_ = r.collapsed;
    return r.outcome;
  }

 private:
  const OpticalBench *bench_;
  TwoPhotonState state_;
};

class NaiveWalk {
 public:
  explicit NaiveWalk(const OpticalBench &bench)
      : bench_(&bench), st_(HiddenState::unpolarized(), HiddenState::unpolarized()) {}

  void plate() {
    st_.photon_a = plate_action(st_.photon_a, bench_->plate_angle);
    st_.mark_plate_passed();
  }
  double threshold(Channel c) const {
    return naive_threshold(c == Channel::A ? st_.photon_a : st_.photon_b, setting_for(*bench_, c));
  }
  PolAxis detect(Channel c, double u) {
    const auto m = naive_measure(st_.photon(c), setting_for(*bench_, c), u, st_.measured(other(c)));
    st_.mark_measured(c);
    if (m.partner_update) st_.photon(other(c)) = *m.partner_update;
    return m.outcome;
  }

 private:
  const OpticalBench *bench_;
  LocalTrialState st_;
};

class LhvWalk {
 public:
  LhvWalk(const OpticalBench &bench, double u_source) : bench_(&bench), st_(make(u_source)) {}

  void plate() {
    st_.photon_a = plate_action(st_.photon_a, bench_->plate_angle);
    st_.mark_plate_passed();
  }
  PolAxis detect(Channel c, double /*u*/) {
    st_.mark_measured(c);
    return lhv_outcome(st_.photon(c).angle(), setting_for(*bench_, c));
  }

 private:
  static LocalTrialState make(double u) {
    const auto pair = lhv_pair(lhv_sample(u));
    return {pair.a, pair.b};
  }
  const OpticalBench *bench_;
  LocalTrialState st_;
};

template <class Walk>
std::pair<PolAxis, PolAxis> walk_trial(Walk walk, const EventTimeline &timeline,
                                       const TrialDraws &draws) {
  PolAxis out_a = PolAxis::X;
  PolAxis out_b = PolAxis::X;
  std::uint32_t draw = 0;
  for (const auto &ev : timeline.events()) {
    switch (ev.event) {
      case Event::PlateA: walk.plate(); break;
      case Event::DetectA: out_a = walk.detect(Channel::A, draws.uniform(draw++)); break;
      case Event::DetectB: out_b = walk.detect(Channel::B, draws.uniform(draw++)); break;
    }
  }
  return {out_a, out_b};
}

template <class Walk>
kernels::ThresholdProgram compile_walk(Walk walk, const EventTimeline &timeline) {
  const auto &events = timeline.events();
  std::size_t i = 0;
  for (; events[i].event == Event::PlateA; ++i) walk.plate();

  kernels::ThresholdProgram prog;
  prog.first = events[i].event == Event::DetectA ? Channel::A : Channel::B;
  prog.p_first = walk.threshold(prog.first);
  ++i;

  // Forces a branch: u = 0 selects X when it is possible, u = threshold selects Y.
  auto second_threshold = [&](double forced_u) {
    Walk branch = walk;
    branch.detect(prog.first, forced_u);
    for (std::size_t k = i; k < events.size(); ++k) {
      if (events[k].event == Event::PlateA) {
        branch.plate();
      } else {
        return branch.threshold(other(prog.first));
      }
    }
    throw InvalidBench("timeline has a single detection");
  };
  if (prog.p_first > 0.0) prog.p_second_given_x = second_threshold(0.0);
  if (prog.p_first < 1.0) prog.p_second_given_y = second_threshold(prog.p_first);
  return prog;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into fixed chunks and merges the per-chunk integer tallies;
// the result does not depend on the number of threads or on scheduling.
template <class RangeFn>
kernels::Accumulator parallel_accumulate(std::uint64_t n, std::size_t programs, bool track_chsh,
                                         const EngineOptions &opts, RangeFn &&run_range) {
  const std::uint64_t chunks = (n + kChunkTrials - 1) / kChunkTrials;
  std::vector<kernels::Accumulator> partial(chunks, kernels::Accumulator(programs, track_chsh));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t begin = c * kChunkTrials;
      run_range(begin, std::min(n, begin + kChunkTrials), partial[c]);
    }
  };
  const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(opts.threads), chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  kernels::Accumulator total(programs, track_chsh);
  for (const auto &p : partial) total.merge(p);
  return total;
}

ProbTable table_from_program(const kernels::ThresholdProgram &p) {
  const double q1 = p.p_first;
  const std::array<double, 4> seq{q1 * p.p_second_given_x, q1 * (1.0 - p.p_second_given_x),
                                  (1.0 - q1) * p.p_second_given_y,
                                  (1.0 - q1) * (1.0 - p.p_second_given_y)};
  ProbTable t;
  if (p.first == Channel::A) {
    t.p = seq;
  } else {
    t.p = {seq[0], seq[2], seq[1], seq[3]};
  }
  return t;
}

double correlator_of(const ProbTable &t) { return t.p[0] + t.p[3] - t.p[1] - t.p[2]; }

kernels::SignProgram sign_program(const OpticalBench &bench) {
  return {bench.alpha.radians(), bench.beta.radians()};
}

}  // namespace

OpticalBench with_settings(OpticalBench bench, AnalyzerSetting alpha, AnalyzerSetting beta) {
  bench.alpha = alpha;
  bench.beta = beta;
  return bench;
}

TrialRecord run_trial(Model model, const OpticalBench &bench, std::uint64_t master_seed,
                      std::uint64_t trial_index) {
  const auto timeline = build_timeline(bench);
  const TrialDraws draws(master_seed, trial_index);
  std::pair<PolAxis, PolAxis> out;
  switch (model) {
    case Model::Qm: out = walk_trial(QmWalk(bench), timeline, draws); break;
    case Model::Naive: out = walk_trial(NaiveWalk(bench), timeline, draws); break;
    case Model::LhvSign: out = walk_trial(LhvWalk(bench, draws.uniform(0)), timeline, draws); break;
  }
  return {out.first, out.second, timeline.b_before_plate(), trial_index, model};
}

TrialRecord run_trial(std::string_view model, const OpticalBench &bench,
                      std::uint64_t master_seed, std::uint64_t trial_index) {
  return run_trial(parse_model(model), bench, master_seed, trial_index);
}

std::vector<TrialRecord> run_trials(Model model, const OpticalBench &bench, std::uint64_t n,
                                    std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(run_trial(model, bench, master_seed, i));
  return out;
}

std::string trials_to_csv(std::span<const TrialRecord> trials) {
  std::string out = "trial,outcome_a,outcome_b,b_before_plate\n";
  for (const auto &t : trials) {
    out += fmt::format("{},{},{},{}\n", t.trial_index, axis_char(t.outcome_a), axis_char(t.outcome_b),
                       t.b_before_plate ? "true" : "false");
  }
  return out;
}

EnsembleStats EnsembleStats::from_tally(const kernels::Tally &tally) {
  EnsembleStats s;
  s.n_xx = tally[0];
  s.n_xy = tally[1];
  s.n_yx = tally[2];
  s.n_yy = tally[3];
  s.n = s.n_xx + s.n_xy + s.n_yx + s.n_yy;
  if (s.n == 0) return s;
  const auto n = static_cast<double>(s.n);
  const auto concordant = static_cast<double>(s.n_xx + s.n_yy);
  const auto discordant = static_cast<double>(s.n_xy + s.n_yx);
  s.e_hat = (concordant - discordant) / n;
  s.stderr_e = std::sqrt(std::max(0.0, 1.0 - s.e_hat * s.e_hat) / n);
  s.marginal_a = {static_cast<double>(s.n_xx + s.n_xy) / n, static_cast<double>(s.n_yx + s.n_yy) / n};
  s.marginal_b = {static_cast<double>(s.n_xx + s.n_yx) / n, static_cast<double>(s.n_xy + s.n_yy) / n};
  return s;
}

std::uint64_t EnsembleStats::count(PolAxis a, PolAxis b) const {
  const std::array<std::uint64_t, 4> c{n_xx, n_xy, n_yx, n_yy};
  return c[joint_index(a, b)];
}

double EnsembleStats::frequency(PolAxis a, PolAxis b) const {
  return n == 0 ? 0.0 : static_cast<double>(count(a, b)) / static_cast<double>(n);
}

std::string EnsembleStats::to_json() const {
  return fmt::format(
      "{{\"n\": {}, \"n_xx\": {}, \"n_xy\": {}, \"n_yx\": {}, \"n_yy\": {}, \"e_hat\": {:.17g}, "
      "\"stderr_e\": {:.17g}, \"marginal_a\": [{:.17g}, {:.17g}], \"marginal_b\": [{:.17g}, {:.17g}]}}",
      n, n_xx, n_xy, n_yx, n_yy, e_hat, stderr_e, marginal_a.p_x, marginal_a.p_y, marginal_b.p_x,
      marginal_b.p_y);
}

kernels::ThresholdProgram compile_threshold_program(Model model, const OpticalBench &bench) {
  const auto timeline = build_timeline(bench);
  switch (model) {
    case Model::Qm: return compile_walk(QmWalk(bench), timeline);
    case Model::Naive: return compile_walk(NaiveWalk(bench), timeline);
    case Model::LhvSign: break;
  }
  throw InvalidArgument("lhv-sign is not a threshold model");
}

kernels::SignSetup compile_sign_setup(const OpticalBench &bench) {
  bench.validate();
  return {bench.plate_present, bench.plate_angle};
}

ProbTable analytic_table(Model model, const OpticalBench &bench) {
  if (model == Model::LhvSign) {
    bench.validate();
    const double offset_a = bench.plate_present ? 2.0 * bench.plate_angle : 0.0;
    return lhv_analytic_table(bench.alpha, bench.beta, offset_a, kHalfPi);
  }
  return table_from_program(compile_threshold_program(model, bench));
}

double analytic_E(Model model, const OpticalBench &bench) {
  return correlator_of(analytic_table(model, bench));
}

EnsembleStats run_ensemble(Model model, const OpticalBench &bench, std::uint64_t n,
                           std::uint64_t master_seed, const EngineOptions &opts) {
  if (n == 0) throw InvalidArgument("ensemble size must be >= 1");
  const auto backend = kernels::resolve(opts.backend);
  kernels::Accumulator acc;
  if (model == Model::LhvSign) {
    const auto setup = compile_sign_setup(bench);
    const std::array programs{sign_program(bench)};
    acc = parallel_accumulate(n, 1, false, opts, [&](std::uint64_t b, std::uint64_t e, kernels::Accumulator &a) {
      kernels::run_sign(backend, setup, programs, master_seed, b, e, a);
    });
  } else {
    const std::array programs{compile_threshold_program(model, bench)};
    acc = parallel_accumulate(n, 1, false, opts, [&](std::uint64_t b, std::uint64_t e, kernels::Accumulator &a) {
      kernels::run_threshold(backend, programs, master_seed, b, e, a);
    });
  }
  return EnsembleStats::from_tally(acc.tallies[0]);
}

EnsembleStats run_ensemble(std::string_view model, const OpticalBench &bench, std::uint64_t n,
                           std::uint64_t master_seed, const EngineOptions &opts) {
  return run_ensemble(parse_model(model), bench, n, master_seed, opts);
}

OrderInvarianceReport order_invariance_report(Model model, const OpticalBench &bench_early_b,
                                              const OpticalBench &bench_late_b, std::uint64_t n,
                                              std::uint64_t master_seed,
                                              const EngineOptions &opts) {
  OpticalBench aligned = bench_late_b;
  aligned.d_prism_b_m = bench_early_b.d_prism_b_m;
  if (!(aligned == bench_early_b)) {
    throw InvalidComparison("benches must differ only in d_prism_b");
  }
  if (!bench_early_b.plate_present) throw InvalidComparison("order test needs the plate installed");
  if (!build_timeline(bench_early_b).b_before_plate() || build_timeline(bench_late_b).b_before_plate()) {
    throw InvalidComparison(
        "early bench must register photon b before the plate and late bench after it");
  }

  OrderInvarianceReport r{.model = model,
                          .early = run_ensemble(model, bench_early_b, n, master_seed, opts),
                          .late = run_ensemble(model, bench_late_b, n, derive_seed(master_seed, 1), opts),
                          .analytic_early = analytic_table(model, bench_early_b),
                          .analytic_late = analytic_table(model, bench_late_b)};
  r.e_analytic_early = correlator_of(r.analytic_early);
  r.e_analytic_late = correlator_of(r.analytic_late);
  r.delta_e = r.late.e_hat - r.early.e_hat;
  r.stderr_delta_e = std::hypot(r.early.stderr_e, r.late.stderr_e);

  r.same_distribution = true;
  const auto n_early = static_cast<double>(r.early.n);
  const auto n_late = static_cast<double>(r.late.n);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto a = static_cast<PolAxis>(k / 2);
    const auto b = static_cast<PolAxis>(k % 2);
    const double fe = r.early.frequency(a, b);
    const double fl = r.late.frequency(a, b);
    r.frequency_diff[k] = fl - fe;
    r.combined_stderr[k] = std::sqrt(fe * (1.0 - fe) / n_early + fl * (1.0 - fl) / n_late);
    const bool same = fl == fe || std::abs(fl - fe) < kSameDistributionSigmas * r.combined_stderr[k];
    r.same_distribution = r.same_distribution && same;
  }
  return r;
}

std::string OrderInvarianceReport::to_json() const {
  auto table = [](const ProbTable &t) {
    return fmt::format("[{:.17g}, {:.17g}, {:.17g}, {:.17g}]", t.p[0], t.p[1], t.p[2], t.p[3]);
  };
  auto arr = [](const std::array<double, 4> &v) {
    return fmt::format("[{:.17g}, {:.17g}, {:.17g}, {:.17g}]", v[0], v[1], v[2], v[3]);
  };
  return fmt::format(
      "{{\"model\": \"{}\", \"early\": {}, \"late\": {}, \"analytic_early\": {}, \"analytic_late\": {}, "
      "\"e_analytic_early\": {:.17g}, \"e_analytic_late\": {:.17g}, \"delta_e\": {:.17g}, "
      "\"stderr_delta_e\": {:.17g}, \"frequency_diff\": {}, \"combined_stderr\": {}, \"verdict\": \"{}\"}}",
      model_name(model), early.to_json(), late.to_json(), table(analytic_early), table(analytic_late),
      e_analytic_early, e_analytic_late, delta_e, stderr_delta_e, arr(frequency_diff),
      arr(combined_stderr), same_distribution ? "SAME" : "DIFFERENT");
}

ChshReport chsh_experiment(Model model, const ChshAngles &angles, std::uint64_t n_per_setting,
                           std::uint64_t master_seed, const OpticalBench &bench,
                           const EngineOptions &opts) {
  if (n_per_setting == 0) throw InvalidArgument("n_per_setting must be >= 1");
  const std::array<OpticalBench, 4> benches{
      with_settings(bench, angles.a, angles.b), with_settings(bench, angles.a, angles.b_prime),
      with_settings(bench, angles.a_prime, angles.b), with_settings(bench, angles.a_prime, angles.b_prime)};
  const auto backend = kernels::resolve(opts.backend);

  kernels::Accumulator acc;
  if (model == Model::LhvSign) {
    const auto setup = compile_sign_setup(bench);
    std::array<kernels::SignProgram, 4> programs;
    std::transform(benches.begin(), benches.end(), programs.begin(), sign_program);
    acc = parallel_accumulate(n_per_setting, 4, true, opts,
                              [&](std::uint64_t b, std::uint64_t e, kernels::Accumulator &a) {
                                kernels::run_sign(backend, setup, programs, master_seed, b, e, a);
                              });
  } else {
    std::array<kernels::ThresholdProgram, 4> programs;
    std::transform(benches.begin(), benches.end(), programs.begin(),
                   [&](const OpticalBench &b) { return compile_threshold_program(model, b); });
    acc = parallel_accumulate(n_per_setting, 4, true, opts,
                              [&](std::uint64_t b, std::uint64_t e, kernels::Accumulator &a) {
                                kernels::run_threshold(backend, programs, master_seed, b, e, a);
                              });
  }

  std::array<EnsembleStats, 4> stats;
  std::transform(acc.tallies.begin(), acc.tallies.end(), stats.begin(), EnsembleStats::from_tally);
  ChshReport r;
  r.e_ab = stats[0].e_hat;
  r.e_abp = stats[1].e_hat;
  r.e_apb = stats[2].e_hat;
  r.e_apbp = stats[3].e_hat;
  r.stderr_ab = stats[0].stderr_e;
  r.stderr_abp = stats[1].stderr_e;
  r.stderr_apb = stats[2].stderr_e;
  r.stderr_apbp = stats[3].stderr_e;
  // S from the per-trial combination histogram: one rounding, so S <= 2 holds
  // exactly whenever every trial has |s| <= 2.
  const auto n = static_cast<double>(n_per_setting);
  std::int64_t sum = 0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < acc.chsh.size(); ++k) {
    const auto s = static_cast<std::int64_t>(2 * k) - 4;
    const auto count = static_cast<std::int64_t>(acc.chsh[k]);
    sum += s * count;
    sum_sq += static_cast<double>(s * s) * static_cast<double>(count);
  }
  const double mean = static_cast<double>(sum) / n;
  r.s = std::abs(mean);
  r.stderr_total = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
  return r;
}

ChshReport chsh_experiment(std::string_view model, const ChshAngles &angles,
                           std::uint64_t n_per_setting, std::uint64_t master_seed,
                           const OpticalBench &bench, const EngineOptions &opts) {
  return chsh_experiment(parse_model(model), angles, n_per_setting, master_seed, bench, opts);
}

ChshReport chsh_analytic(Model model, const ChshAngles &angles, const OpticalBench &bench) {
  return chsh_S([&](AnalyzerSetting x, AnalyzerSetting y) { return analytic_E(model, with_settings(bench, x, y)); },
                angles);
}

}  // namespace entangle
