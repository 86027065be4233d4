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

#include "entangle/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "entangle/errors.hpp"
#include "entangle/experiment.hpp"
#include "entangle/report_io.hpp"

namespace entangle::cli {

namespace {

// Text output uses 6 decimals, JSON and CSV 17 significant digits.

struct BenchFlags {
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  bool plate = true;
  double plate_angle_deg = 45.0;
  double d_plate_a = 0.5;
  double d_prism_a = 1.5;
  double d_prism_b = 1.0;
};

// Registered options of one subcommand; `given` tells flags from defaults.
struct BenchOptions {
  CLI::Option *alpha = nullptr, *beta = nullptr, *plate_opt = nullptr, *plate_angle = nullptr,
              *d_plate = nullptr, *d_prism_a_opt = nullptr, *d_prism_b_opt = nullptr;
};

struct Config {
  std::string model = "qm";
  std::uint64_t trials = 100000;
  std::string seed_text;
  std::string config_path;
  std::string format = "text";
  std::string out_path;
  unsigned threads = 0;
  std::string kernel = "auto";
  BenchFlags bench;
  const BenchOptions *bench_options = nullptr;
  // order-test
  double d_prism_b_early = 0.25;
  double d_prism_b_late = 1.0;
  // chsh
  std::string angles = "0,45,22.5,67.5";
  // sweep
  std::string axis = "beta";
  double start_deg = 0.0;
  double end_deg = 180.0;
  double step_deg = 7.5;
};

class BadConfig : public Error {
 public:
  explicit BadConfig(const std::string &what) : Error(what) {}
};

void add_common(CLI::App *sc, Config &c) {
  sc->add_option("--model", c.model, "Model: qm | lhv-sign | naive")->capture_default_str();
  sc->add_option("--trials", c.trials, "Trials per ensemble (count, >= 1)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sc->add_option("--seed", c.seed_text,
                 fmt::format("Master seed (integer; falls back to ${}, then {})", kSeedEnvVar, kDefaultSeed));
  sc->add_option("--config", c.config_path, "Bench configuration JSON file (path)");
  sc->add_option("--format", c.format, "Output format: text | json | csv")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json", "csv"}));
  sc->add_option("--out", c.out_path, "Write output to this file instead of stdout (path)");
  sc->add_option("--threads", c.threads, "Worker threads (count, 0 = all cores)")->capture_default_str();
  sc->add_option("--kernel", c.kernel, "Trial kernel: auto | scalar | avx2")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

BenchOptions add_bench(CLI::App *sc, BenchFlags &b, bool with_analyzers = true) {
  BenchOptions o;
  if (with_analyzers) {
    o.alpha = sc->add_option("--alpha", b.alpha_deg, "Channel-a prism angle (degrees)")->capture_default_str();
    o.beta = sc->add_option("--beta", b.beta_deg, "Channel-b prism angle (degrees)")->capture_default_str();
  }
  o.plate_opt = sc->add_flag("--plate,!--no-plate", b.plate, "Install / remove the half-wave plate in channel a");
  o.plate_angle = sc->add_option("--plate-angle", b.plate_angle_deg, "Half-wave plate fast-axis angle (degrees)")
                      ->capture_default_str();
  o.d_plate = sc->add_option("--d-plate-a", b.d_plate_a, "Crystal to plate distance, channel a (meters)")
                  ->capture_default_str();
  o.d_prism_a_opt = sc->add_option("--d-prism-a", b.d_prism_a, "Crystal to prism distance, channel a (meters)")
                        ->capture_default_str();
  o.d_prism_b_opt = sc->add_option("--d-prism-b", b.d_prism_b, "Crystal to prism distance, channel b (meters)")
                        ->capture_default_str();
  return o;
}

bool given(const CLI::Option *o) { return o != nullptr && o->count() > 0; }

// Defaults, then the config file, then explicit flags.
OpticalBench make_bench(const Config &c) {
  OpticalBench bench;
  if (!c.config_path.empty()) bench = load_bench_file(c.config_path, bench);
  const auto &b = c.bench;
  const auto &o = *c.bench_options;
  if (given(o.alpha)) bench.alpha = AnalyzerSetting::from_degrees(b.alpha_deg);
  if (given(o.beta)) bench.beta = AnalyzerSetting::from_degrees(b.beta_deg);
  if (given(o.plate_opt)) bench.plate_present = b.plate;
  if (given(o.plate_angle)) bench.plate_angle = degrees_to_radians(b.plate_angle_deg);
  if (given(o.d_plate)) bench.d_plate_a_m = b.d_plate_a;
  if (given(o.d_prism_a_opt)) bench.d_prism_a_m = b.d_prism_a;
  if (given(o.d_prism_b_opt)) bench.d_prism_b_m = b.d_prism_b;
  bench.validate();
  return bench;
}

std::uint64_t parse_seed(const std::string &text, const char *source) {
  std::uint64_t v = 0;
  std::size_t used = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw BadConfig(fmt::format("{} is not an unsigned integer seed: '{}'", source, text));
  }
  return v;
}

std::uint64_t resolve_seed(const Config &c) {
  if (!c.seed_text.empty()) return parse_seed(c.seed_text, "--seed");
  if (const char *env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    return parse_seed(env, kSeedEnvVar);
  }
  return kDefaultSeed;
}

EngineOptions engine_options(const Config &c) {
  return {c.threads, kernels::parse_backend(c.kernel)};
}

std::string describe_bench(const OpticalBench &b) {
  std::string plate = b.plate_present ? fmt::format("plate at {:.6f} deg", radians_to_degrees(b.plate_angle))
                                      : std::string("no plate");
  return fmt::format(
      "alpha {:.6f} deg, beta {:.6f} deg, {}, d_plate_a {:.6f} m, d_prism_a {:.6f} m, d_prism_b {:.6f} m",
      b.alpha.degrees(), b.beta.degrees(), plate, b.d_plate_a_m, b.d_prism_a_m, b.d_prism_b_m);
}

std::string describe_timeline(const OpticalBench &b) {
  const auto t = build_timeline(b);
  std::string out;
  for (const auto &e : t.events()) {
    if (!out.empty()) out += ", ";
    out += fmt::format("{} {:.6e} s", event_name(e.event), e.time_s);
  }
  if (b.plate_present) {
    out += t.b_before_plate() ? " (b registered before a reaches the plate)"
                              : " (b registered after a passes the plate)";
  }
  return out;
}

std::string count_table(const EnsembleStats &s, const std::string &indent = "  ") {
  return fmt::format("{0}{1:>8}{2:>14}{3:>14}\n{0}{4:>8}{5:>14}{6:>14}\n{0}{7:>8}{8:>14}{9:>14}\n", indent, "",
                     "b=X", "b=Y", "a=X", s.n_xx, s.n_xy, "a=Y", s.n_yx, s.n_yy);
}

// ---- pair ----

std::string cmd_pair(const Config &c) {
  const Model model = parse_model(c.model);
  const OpticalBench bench = make_bench(c);
  const std::uint64_t seed = resolve_seed(c);
  const auto opts = engine_options(c);

  if (c.format == "csv") {
    const auto trials = run_trials(model, bench, c.trials, seed);
    return trials_to_csv(trials);
  }
  const auto stats = run_ensemble(model, bench, c.trials, seed, opts);
  const bool analytic = model == Model::Qm;
  const double e_analytic = analytic ? analytic_E(model, bench) : 0.0;

  if (c.format == "json") {
    return fmt::format("{{\"command\": \"pair\", \"model\": \"{}\", \"seed\": {}, \"bench\": {}, "
                       "\"stats\": {}, \"e_analytic\": {}}}\n",
                       model_name(model), seed, bench_to_json(bench), stats.to_json(),
                       analytic ? fmt::format("{:.17g}", e_analytic) : std::string("null"));
  }
  std::string out = fmt::format("pair: model {}, {} trials, seed {}\n", model_name(model), stats.n, seed);
  out += fmt::format("bench: {}\n", describe_bench(bench));
  out += fmt::format("timeline: {}\n", describe_timeline(bench));
  out += "coincidence counts:\n" + count_table(stats);
  out += fmt::format("E_hat = {:.6f} +/- {:.6f}\n", stats.e_hat, stats.stderr_e);
  out += fmt::format("marginal a: P(X) = {:.6f}, marginal b: P(X) = {:.6f}\n", stats.marginal_a.p_x,
                     stats.marginal_b.p_x);
  if (analytic) out += fmt::format("E_analytic = {:.6f}\n", e_analytic);
  return out;
}

// ---- order-test ----

std::string cmd_order_test(const Config &c) {
  const Model model = parse_model(c.model);
  OpticalBench early = make_bench(c);
  OpticalBench late = early;
  early.d_prism_b_m = c.d_prism_b_early;
  late.d_prism_b_m = c.d_prism_b_late;
  early.validate();
  late.validate();
  const std::uint64_t seed = resolve_seed(c);
  const auto r = order_invariance_report(model, early, late, c.trials, seed, engine_options(c));

  if (c.format == "json") {
    return fmt::format("{{\"command\": \"order-test\", \"seed\": {}, \"bench_early\": {}, \"bench_late\": {}, "
                       "\"report\": {}}}\n",
                       seed, bench_to_json(early), bench_to_json(late), r.to_json());
  }
  if (c.format == "csv") {
    std::string out = "bench,d_prism_b_m,n,n_xx,n_xy,n_yx,n_yy,e_hat,stderr_e,e_analytic\n";
    auto row = [](const char *name, const OpticalBench &b, const EnsembleStats &s, double e) {
      return fmt::format("{},{:.17g},{},{},{},{},{},{:.17g},{:.17g},{:.17g}\n", name, b.d_prism_b_m, s.n, s.n_xx,
                         s.n_xy, s.n_yx, s.n_yy, s.e_hat, s.stderr_e, e);
    };
    return out + row("early", early, r.early, r.e_analytic_early) + row("late", late, r.late, r.e_analytic_late);
  }
  std::string out = fmt::format("order-test: model {}, {} trials per bench, seed {}\n", model_name(model),
                                c.trials, seed);
  auto section = [&](const char *name, const OpticalBench &b, const EnsembleStats &s, const ProbTable &t,
                     double e) {
    std::string sec = fmt::format("{} bench (d_prism_b {:.6f} m)\n  timeline: {}\n", name, b.d_prism_b_m,
                                  describe_timeline(b));
    sec += count_table(s, "  ");
    sec += fmt::format("  E_hat = {:.6f} +/- {:.6f}\n", s.e_hat, s.stderr_e);
    sec += fmt::format("  analytic P[XX, XY, YX, YY] = [{:.6f}, {:.6f}, {:.6f}, {:.6f}], E = {:.6f}\n", t.p[0],
                       t.p[1], t.p[2], t.p[3], e);
    return sec;
  };
  out += fmt::format("bench: {}\n", describe_bench(early));
  out += section("early", early, r.early, r.analytic_early, r.e_analytic_early);
  out += section("late", late, r.late, r.analytic_late, r.e_analytic_late);
  out += fmt::format("E_early = {:.6f}, E_late = {:.6f}, delta E = {:.6f} +/- {:.6f}\n", r.early.e_hat,
                     r.late.e_hat, r.delta_e, r.stderr_delta_e);
  out += fmt::format("verdict: {}\n", r.same_distribution ? "SAME" : "DIFFERENT");
  return out;
}

// ---- chsh ----

ChshAngles parse_angles(const std::string &text) {
  std::vector<double> deg;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      deg.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw BadConfig(fmt::format("--angles: '{}' is not a number", item));
    }
  }
  if (deg.size() != 4) throw BadConfig("--angles needs four comma-separated values a,a',b,b' (degrees)");
  return {AnalyzerSetting::from_degrees(deg[0]), AnalyzerSetting::from_degrees(deg[1]),
          AnalyzerSetting::from_degrees(deg[2]), AnalyzerSetting::from_degrees(deg[3])};
}

constexpr double kClassicalBound = 2.0;
constexpr double kViolationSigmas = 3.0;

std::string cmd_chsh(const Config &c) {
  const Model model = parse_model(c.model);
  const OpticalBench bench = make_bench(c);
  const ChshAngles angles = parse_angles(c.angles);
  const std::uint64_t seed = resolve_seed(c);
  const auto r = chsh_experiment(model, angles, c.trials, seed, bench, engine_options(c));
  const auto analytic = chsh_analytic(model, angles, bench);
  const bool violated = r.s - kViolationSigmas * r.stderr_total > kClassicalBound;

  if (c.format == "json") {
    return fmt::format(
        "{{\"command\": \"chsh\", \"model\": \"{}\", \"seed\": {}, \"n_per_setting\": {}, "
        "\"angles_deg\": [{:.17g}, {:.17g}, {:.17g}, {:.17g}], \"bench\": {}, \"report\": {}, "
        "\"s_analytic\": {:.17g}, \"classical_bound\": 2, \"violated\": {}}}\n",
        model_name(model), seed, c.trials, angles.a.degrees(), angles.a_prime.degrees(), angles.b.degrees(),
        angles.b_prime.degrees(), bench_to_json(bench), r.to_json(), analytic.s, violated);
  }
  if (c.format == "csv") {
    std::string out = "term,angle_a_deg,angle_b_deg,e_hat,stderr,e_analytic\n";
    auto row = [](const char *term, AnalyzerSetting x, AnalyzerSetting y, double e, double se, double ea) {
      return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", term, x.degrees(), y.degrees(), e, se, ea);
    };
    out += row("ab", angles.a, angles.b, r.e_ab, r.stderr_ab, analytic.e_ab);
    out += row("abp", angles.a, angles.b_prime, r.e_abp, r.stderr_abp, analytic.e_abp);
    out += row("apb", angles.a_prime, angles.b, r.e_apb, r.stderr_apb, analytic.e_apb);
    out += row("apbp", angles.a_prime, angles.b_prime, r.e_apbp, r.stderr_apbp, analytic.e_apbp);
    out += fmt::format("S,,,{:.17g},{:.17g},{:.17g}\n", r.s, r.stderr_total, analytic.s);
    return out;
  }
  std::string out = fmt::format("chsh: model {}, {} trials per setting, seed {}\n", model_name(model), c.trials,
                                seed);
  out += fmt::format("angles: a {:.6f}, a' {:.6f}, b {:.6f}, b' {:.6f} deg\n", angles.a.degrees(),
                     angles.a_prime.degrees(), angles.b.degrees(), angles.b_prime.degrees());
  out += fmt::format("bench: {}\n", describe_bench(bench));
  auto term = [](const char *name, double e, double se, double ea) {
    return fmt::format("  {:<8} = {:>9.6f} +/- {:.6f}   (analytic {:.6f})\n", name, e, se, ea);
  };
  out += term("E(a,b)", r.e_ab, r.stderr_ab, analytic.e_ab);
  out += term("E(a,b')", r.e_abp, r.stderr_abp, analytic.e_abp);
  out += term("E(a',b)", r.e_apb, r.stderr_apb, analytic.e_apb);
  out += term("E(a',b')", r.e_apbp, r.stderr_apbp, analytic.e_apbp);
  out += fmt::format("S = {:.6f} +/- {:.6f}   (analytic {:.6f})\n", r.s, r.stderr_total, analytic.s);
  out += fmt::format("classical bound 2: {}\n", violated ? "VIOLATED" : "NOT VIOLATED");
  return out;
}

// ---- sweep ----

std::string cmd_sweep(const Config &c) {
  const Model model = parse_model(c.model);
  const OpticalBench base = make_bench(c);
  if (!(c.step_deg > 0.0) || !std::isfinite(c.step_deg)) throw BadConfig("--step must be > 0 degrees");
  if (!std::isfinite(c.start_deg) || !std::isfinite(c.end_deg) || c.end_deg < c.start_deg) {
    throw BadConfig("--end must be >= --start");
  }
  const std::uint64_t seed = resolve_seed(c);
  const auto opts = engine_options(c);
  const bool analytic = model == Model::Qm;
  const auto rows = static_cast<std::uint64_t>(std::floor((c.end_deg - c.start_deg) / c.step_deg + 1e-9)) + 1;

  std::string csv = "angle_deg,E_analytic,E_hat,stderr\n";
  std::string json = "[";
  for (std::uint64_t k = 0; k < rows; ++k) {
    const double angle = c.start_deg + static_cast<double>(k) * c.step_deg;
    OpticalBench b = base;
    (c.axis == "alpha" ? b.alpha : b.beta) = AnalyzerSetting::from_degrees(angle);
    const auto stats = run_ensemble(model, b, c.trials, derive_seed(seed, k), opts);
    const std::string ea = analytic ? fmt::format("{:.17g}", analytic_E(model, b)) : std::string();
    csv += fmt::format("{:.17g},{},{:.17g},{:.17g}\n", angle, ea, stats.e_hat, stats.stderr_e);
    json += fmt::format("{}{{\"angle_deg\": {:.17g}, \"E_analytic\": {}, \"E_hat\": {:.17g}, \"stderr\": {:.17g}}}",
                        k ? ", " : "", angle, analytic ? ea : std::string("null"), stats.e_hat, stats.stderr_e);
  }
  json += "]\n";
  return c.format == "json" ? json : csv;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Config c;
  CLI::App app{"Two-photon polarization entanglement bench: quantum prediction versus local models"};
  app.name("entangle-bench");
  app.require_subcommand(1);

  auto *pair = app.add_subcommand("pair", "Run one ensemble on a bench and print coincidence counts");
  add_common(pair, c);
  const auto pair_bench = add_bench(pair, c.bench);

  auto *order = app.add_subcommand("order-test",
                                   "Compare photon-b registration before and after photon a crosses the plate");
  add_common(order, c);
  const auto order_bench = add_bench(order, c.bench);
  order->add_option("--d-prism-b-early", c.d_prism_b_early, "Channel-b prism distance, early bench (meters)")
      ->capture_default_str();
  order->add_option("--d-prism-b-late", c.d_prism_b_late, "Channel-b prism distance, late bench (meters)")
      ->capture_default_str();

  auto *chsh = app.add_subcommand("chsh", "Estimate the CHSH combination S and compare it with the bound 2");
  add_common(chsh, c);
  const auto chsh_bench = add_bench(chsh, c.bench, false);
  chsh->add_option("--angles", c.angles, "Analyzer angles a,a',b,b' (degrees)")->capture_default_str();

  auto *sweep = app.add_subcommand("sweep", "Sweep one analyzer angle and emit E per row as CSV");
  add_common(sweep, c);
  const auto sweep_bench = add_bench(sweep, c.bench);
  sweep->add_option("--axis", c.axis, "Swept analyzer: alpha | beta")
      ->capture_default_str()
      ->check(CLI::IsMember({"alpha", "beta"}));
  sweep->add_option("--start", c.start_deg, "First angle (degrees)")->capture_default_str();
  sweep->add_option("--end", c.end_deg, "Last angle (degrees)")->capture_default_str();
  sweep->add_option("--step", c.step_deg, "Angle step (degrees, > 0)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    std::string text;
    if (pair->parsed()) {
      c.bench_options = &pair_bench;
      text = cmd_pair(c);
    } else if (order->parsed()) {
      c.bench_options = &order_bench;
      text = cmd_order_test(c);
    } else if (chsh->parsed()) {
      c.bench_options = &chsh_bench;
      text = cmd_chsh(c);
    } else {
      c.bench_options = &sweep_bench;
      text = cmd_sweep(c);
    }
    if (c.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(c.out_path, std::ios::binary);
      if (!file) throw BadConfig(fmt::format("cannot write '{}'", c.out_path));
      file << text;
    }
    return kExitOk;
  } catch (const ModelNotFound &e) {
    err << "error: " << e.what() << " (known models: qm, lhv-sign, naive)\n";
    return kExitModelNotFound;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
}

}  // namespace entangle::cli
