/*
   Copyright 2026 The csamimo Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// csa_sim: packet-loss sweeps, singleton micro-experiments and analytic
// failure curves for coded slotted ALOHA over a massive-MIMO uplink.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "csamimo/analysis.hpp"
#include "csamimo/config_file.hpp"
#include "csamimo/csv.hpp"
#include "csamimo/error.hpp"
#include "csamimo/harness.hpp"

using namespace csamimo;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> algorithm;
  std::optional<int> ka;
  std::optional<std::string> ka_range;
  std::optional<std::int64_t> frames;
  std::optional<std::int64_t> min_frames;
  std::optional<std::int64_t> target_losses;
  std::optional<std::uint64_t> seed;
  std::optional<int> m;
  std::optional<int> n_slots;
  std::optional<int> n_pilots;
  std::optional<int> n_d;
  std::optional<int> r;
  std::optional<int> t;
  std::optional<double> noise_var;
  std::optional<double> latency_ms;
  std::optional<double> symbol_rate;
  std::string decode_criterion = "bit";
  std::optional<std::string> out;
  std::string experiment = "plr";
  int workers = 0;
  bool no_wall_time = false;
  bool snb_no_generator_update = false;
  int a_pilot = 1;
  std::string a_range = "1:120:1";
  double p = 0.0;
  std::int64_t trials = 10000;
};

void write_or_print(const std::optional<std::string>& out, const std::string& text,
                    const std::function<void(const std::string&)>& emit) {
  if (out) {
    emit(*out);
  } else {
    std::cout << text;
  }
}

SweepSpec build_spec(const Flags& f) {
  SweepSpec spec;
  bool n_slots_given = false;
  if (f.config) {
    for (const auto& [key, value] : read_key_values(*f.config)) {
      apply_setting(spec, key, value);
      n_slots_given = n_slots_given || key == "n_slots";
    }
  }
  SystemConfig& c = spec.config;
  if (f.m) c.m = *f.m;
  if (f.n_pilots) c.n_p = *f.n_pilots;
  if (f.n_d) c.n_d = *f.n_d;
  if (f.r) c.r = *f.r;
  if (f.t) c.t = *f.t;
  if (f.noise_var) c.noise_var = *f.noise_var;
  if (f.latency_ms) c.latency_ms = *f.latency_ms;
  if (f.symbol_rate) c.symbol_rate = *f.symbol_rate;
  if (f.n_slots) {
    c.n_slots = *f.n_slots;
    n_slots_given = true;
  }
  if (!n_slots_given) c.n_slots = compute_slot_count(c.latency_ms, c.symbol_rate, c.n_p, c.n_d);

  if (f.algorithm) spec.algorithms = parse_algorithm_list(*f.algorithm);
  if (spec.algorithms.empty()) spec.algorithms = {Algorithm::kPab};
  if (f.ka_range) spec.ka_values = parse_int_list(*f.ka_range);
  if (f.ka) spec.ka_values = {*f.ka};
  if (spec.ka_values.empty()) spec.ka_values = {c.k_a};
  if (f.frames) spec.max_frames = *f.frames;
  if (f.min_frames) spec.min_frames = *f.min_frames;
  spec.min_frames = std::min(spec.min_frames, spec.max_frames);
  if (f.target_losses) spec.target_loss_events = *f.target_losses;
  if (f.seed) spec.base_seed = *f.seed;
  spec.workers = f.workers;
  spec.record_wall_time = !f.no_wall_time;
  spec.receiver.criterion = parse_decode_criterion(f.decode_criterion);
  spec.receiver.snb_generator_update = !f.snb_no_generator_update;
  validate(spec);
  return spec;
}

int run_plr(const Flags& f) {
  const SweepSpec spec = build_spec(f);
  std::cerr << fmt::format("# M={} N={} N_P={} N_D={} r={} t={} noise_var={} seed={}\n",
                           spec.config.m, spec.config.n_slots, spec.config.n_p, spec.config.n_d,
                           spec.config.r, spec.config.t, spec.config.noise_var, spec.base_seed);
  const auto records = run_plr_sweep(spec, [](const PlrRecord& r) {
    std::cerr << fmt::format("{} K_a={} frames={} lost={}/{} P_L={:.3e} [{:.3e}, {:.3e}] {:.1f}s\n",
                             to_string(r.algorithm), r.ka, r.frames_run, r.packets_lost,
                             r.packets_sent, r.plr, r.ci_low, r.ci_high, r.wall_seconds);
  });
  write_or_print(f.out, format_plr_csv(records),
                 [&](const std::string& path) { emit_csv(records, path); });
  return 0;
}

int run_singleton(const Flags& f) {
  const SweepSpec spec = build_spec(f);
  std::vector<SingletonRecord> records;
  for (Algorithm algorithm : spec.algorithms) {
    for (int a_total : parse_int_list(f.a_range)) {
      if (a_total < f.a_pilot) continue;
      SingletonSpec s;
      s.m = spec.config.m;
      s.n_p = spec.config.n_p;
      s.n_d = spec.config.n_d;
      s.t = spec.config.t;
      s.noise_var = spec.config.noise_var;
      s.a_pilot = f.a_pilot;
      s.a_total = a_total;
      s.p = f.p;
      s.trials = f.trials;
      s.algorithm = algorithm;
      s.criterion = spec.receiver.criterion;
      s.seed = spec.base_seed;
      s.workers = spec.workers;
      records.push_back(run_singleton_experiment(s));
      const auto& r = records.back();
      std::cerr << fmt::format("{} |A|={} |A^j|={} p={} fail={}/{} ({:.4g})\n",
                               to_string(r.algorithm), r.a_total, r.a_pilot, r.p, r.failures,
                               r.trials, r.fail_prob);
    }
  }
  write_or_print(f.out, format_singleton_csv(records),
                 [&](const std::string& path) { emit_singleton_csv(records, path); });
  return 0;
}

int run_analysis(const Flags& f) {
  const SweepSpec spec = build_spec(f);
  std::vector<int> range;
  for (int a : parse_int_list(f.a_range)) {
    if (a >= f.a_pilot) range.push_back(a);
  }
  const auto curve = failure_curve(spec.config.m, spec.config.n_d, spec.config.t, f.a_pilot, range);
  write_or_print(f.out, format_analysis_csv(curve),
                 [&](const std::string& path) { emit_analysis_csv(curve, path); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded slotted ALOHA / massive MIMO interference subtraction simulator"};
  Flags f;
  app.add_option("--config", f.config, "key = value configuration file");
  app.add_option("--experiment", f.experiment, "plr, singleton or analysis")
      ->check(CLI::IsMember({"plr", "singleton", "analysis"}));
  app.add_option("--algorithm", f.algorithm, "SNB, PAB, PRCE, LOGICAL (comma separated)");
  app.add_option("--ka", f.ka, "single number of active users");
  app.add_option("--ka-range", f.ka_range, "start:stop:step or a,b,c");
  app.add_option("--frames", f.frames, "maximum frames per point");
  app.add_option("--min-frames", f.min_frames, "minimum frames per point");
  app.add_option("--target-losses", f.target_losses, "stop once this many packets are lost");
  app.add_option("--seed", f.seed, "base seed");
  app.add_option("--m", f.m, "BS antennas");
  app.add_option("--n-slots", f.n_slots, "slots per frame (default: from latency budget)");
  app.add_option("--n-pilots", f.n_pilots, "number (and length) of pilots");
  app.add_option("--n-d", f.n_d, "payload symbols");
  app.add_option("--r", f.r, "replicas per user");
  app.add_option("--t", f.t, "correctable errors");
  app.add_option("--noise-var", f.noise_var, "noise variance");
  app.add_option("--latency-ms", f.latency_ms, "maximum latency in ms");
  app.add_option("--symbol-rate", f.symbol_rate, "symbols per second");
  app.add_option("--decode-criterion", f.decode_criterion, "bit or symbol")
      ->check(CLI::IsMember({"bit", "symbol"}));
  app.add_option("--out", f.out, "output CSV (default: stdout)");
  app.add_option("--workers", f.workers, "worker threads (0 = all cores)");
  app.add_flag("--no-wall-time", f.no_wall_time, "write wall_seconds as 0");
  app.add_flag("--snb-no-generator-update", f.snb_no_generator_update,
               "SNB: leave f/g of the generator slot untouched");
  app.add_option("--a-pilot", f.a_pilot, "singleton/analysis: users on the probed pilot");
  app.add_option("--a-range", f.a_range, "singleton/analysis: users per slot, start:stop:step");
  app.add_option("--p", f.p, "singleton: pre-subtracted fraction of out-of-pilot users");
  app.add_option("--trials", f.trials, "singleton: trials per point");
  CLI11_PARSE(app, argc, argv);

  try {
    if (f.experiment == "singleton") return run_singleton(f);
    if (f.experiment == "analysis") return run_analysis(f);
    return run_plr(f);
  } catch (const Error& e) {
    std::cerr << fmt::format("error ({}): {}\n", to_string(e.code()), e.what());
    return 2;
  }
}
