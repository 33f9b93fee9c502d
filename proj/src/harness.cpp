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

#include "csamimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

namespace {

std::size_t idx(std::int64_t i) { return static_cast<std::size_t>(i); }

struct FrameOutcome {
  int lost = 0;
  int n_up = 0;
  int n_pa = 0;
};

DecodeReport simulate_frame(const SystemConfig& config, Algorithm algorithm,
                            const ReceiverOptions& options, std::uint64_t seed,
                            std::uint64_t stream_id) {
  RandomStream rng(seed, stream_id);
  if (algorithm == Algorithm::kLogical) {
    const auto plans = generate_user_plans(config, rng);
    return logical_peel(config, plans);
  }
  const FrameInstance frame = generate_frame(config, rng);
  return run_receiver(frame, algorithm, options);
}

std::uint64_t singleton_stream_id(const SingletonSpec& spec, std::int64_t trial) {
  return (static_cast<std::uint64_t>(spec.a_total) << 44) ^
         (static_cast<std::uint64_t>(spec.a_pilot) << 36) ^ static_cast<std::uint64_t>(trial);
}

}  // namespace

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn) {
  const int threads = static_cast<int>(std::min<std::int64_t>(resolve_workers(workers), n));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

WilsonInterval wilson_interval(std::int64_t events, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(events) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the bounds always bracket the point estimate despite rounding.
  return {std::clamp(centre - half, 0.0, phat), std::clamp(centre + half, phat, 1.0)};
}

std::uint64_t frame_stream_id(int ka, std::int64_t frame_index) {
  return (static_cast<std::uint64_t>(ka) << 32) | static_cast<std::uint64_t>(frame_index);
}

void validate(const SweepSpec& spec) {
  validate(spec.config);
  if (spec.min_frames < 1 || spec.target_loss_events < 1 || spec.max_frames < spec.min_frames) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("need 1 <= min_frames <= max_frames and target_loss_events >= 1 "
                            "(min={}, max={}, target={})",
                            spec.min_frames, spec.max_frames, spec.target_loss_events));
  }
  for (int ka : spec.ka_values) {
    if (ka < 0) throw Error(ErrorCode::kInvalidConfig, fmt::format("negative K_a {}", ka));
  }
}

PlrRecord run_plr_point(const SweepSpec& spec, Algorithm algorithm, int ka) {
  validate(spec);
  SystemConfig config = spec.config;
  config.k_a = ka;
  const auto start = std::chrono::steady_clock::now();
  const int workers = resolve_workers(spec.workers);
  const std::int64_t batch = std::max<std::int64_t>(4, 2 * workers);

  PlrRecord rec;
  rec.algorithm = algorithm;
  rec.ka = ka;
  std::int64_t total_up = 0;
  std::int64_t total_pa = 0;
  bool done = false;
  std::int64_t next_frame = 0;
  std::vector<FrameOutcome> outcomes;
  while (!done) {
    const std::int64_t count = std::min(batch, spec.max_frames - next_frame);
    outcomes.assign(idx(count), {});
    parallel_for(count, workers, [&](std::int64_t i) {
      const DecodeReport report = simulate_frame(config, algorithm, spec.receiver,
                                                 spec.base_seed,
                                                 frame_stream_id(ka, next_frame + i));
      outcomes[idx(i)] = {report.lost_count, report.n_up, report.n_pa};
    });
    // Stopping decision in frame order, so it does not depend on scheduling.
    for (const FrameOutcome& o : outcomes) {
      ++rec.frames_run;
      rec.packets_lost += o.lost;
      total_up += o.n_up;
      total_pa += o.n_pa;
      if (rec.frames_run >= spec.max_frames ||
          (rec.frames_run >= spec.min_frames && rec.packets_lost >= spec.target_loss_events)) {
        done = true;
        break;
      }
    }
    next_frame += count;
  }

  rec.packets_sent = rec.frames_run * ka;
  rec.plr = rec.packets_sent > 0
                ? static_cast<double>(rec.packets_lost) / static_cast<double>(rec.packets_sent)
                : 0.0;
  const WilsonInterval ci = wilson_interval(rec.packets_lost, rec.packets_sent);
  rec.ci_low = ci.low;
  rec.ci_high = ci.high;
  rec.mean_n_up = static_cast<double>(total_up) / static_cast<double>(rec.frames_run);
  rec.mean_n_pa = static_cast<double>(total_pa) / static_cast<double>(rec.frames_run);
  if (spec.record_wall_time) {
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<PlrRecord> run_plr_sweep(const SweepSpec& spec, const SweepProgress& progress) {
  validate(spec);
  std::vector<PlrRecord> records;
  for (Algorithm algorithm : spec.algorithms) {
    for (int ka : spec.ka_values) {
      records.push_back(run_plr_point(spec, algorithm, ka));
      if (progress) progress(records.back());
    }
  }
  return records;
}

PairedFrames run_paired_frames(const SystemConfig& config, int ka, std::int64_t frames,
                               const std::vector<Algorithm>& algorithms,
                               std::uint64_t base_seed, const ReceiverOptions& options,
                               int workers) {
  SystemConfig cfg = config;
  cfg.k_a = ka;
  validate(cfg);
  PairedFrames out;
  out.algorithms = algorithms;
  out.decoded.assign(algorithms.size(), std::vector<int>(idx(frames), 0));
  out.user_decoded.assign(algorithms.size(),
                          std::vector<std::vector<std::uint8_t>>(idx(frames)));
  parallel_for(frames, workers, [&](std::int64_t f) {
    RandomStream rng(base_seed, frame_stream_id(ka, f));
    const FrameInstance frame = generate_frame(cfg, rng);
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      DecodeReport report = run_receiver(frame, algorithms[a], options);
      out.decoded[a][idx(f)] = report.decoded_count;
      out.user_decoded[a][idx(f)] = std::move(report.user_decoded);
    }
  });
  return out;
}

namespace {

/// Draws the pilot-j statistics of the probed slot directly:
///   phi = sum_{k in A^j} h_k + z,          z ~ CN(0, sigma^2 / N_P) per entry
///   f   = sum_{u in A} (phi^H h_u) x_u + w, w ~ CN(0, sigma^2 ||phi||^2) per symbol
/// For users off pilot j, phi^H h_u | phi ~ CN(0, sigma_h^2 ||phi||^2).
bool projected_snb_trial_fails(const SingletonSpec& spec, std::int64_t trial) {
  RandomStream rng(spec.seed, singleton_stream_id(spec, trial));
  const int m = spec.m;
  std::vector<ChannelVector> on_pilot;
  on_pilot.reserve(static_cast<std::size_t>(spec.a_pilot));
  ChannelVector phi = ChannelVector::Zero(m);
  for (int k = 0; k < spec.a_pilot; ++k) {
    on_pilot.push_back(draw_channel_vector(rng, m, 1.0));
    phi += on_pilot.back();
  }
  const double pilot_noise = spec.noise_var / spec.n_p;
  if (pilot_noise > 0.0) {
    for (int i = 0; i < m; ++i) phi[i] += rng.complex_normal(pilot_noise);
  }
  double g = phi.squaredNorm();

  UserPlan target;
  CRowVector f = CRowVector::Zero(spec.n_d);
  for (int u = 0; u < spec.a_total; ++u) {
    Bits bits = random_bits(rng, 2 * spec.n_d);
    const QpskSequence x = qpsk_modulate(bits);
    const Complex gain = u < spec.a_pilot ? Complex(phi.dot(on_pilot[static_cast<std::size_t>(u)]))
                                          : rng.complex_normal(g);
    f += gain * x;
    if (u > 0 && u < spec.a_pilot) {
      // Sharer decoded in another slot: SNB replica update with ||h||^2 := M.
      f -= static_cast<double>(m) * x;
    }
    if (u == 0) target.payload_bits = std::move(bits);
  }
  if (spec.noise_var > 0.0) {
    const double w_var = spec.noise_var * g;
    for (Eigen::Index n = 0; n < f.size(); ++n) f[n] += rng.complex_normal(w_var);
  }
  g -= static_cast<double>(m) * (spec.a_pilot - 1);

  const auto x_hat = mrc_payload_estimate(f, g, no_estimate_threshold(m));
  if (!x_hat) return true;
  return !genie_bounded_distance_decode(
      std::span<const Complex>(x_hat->data(), static_cast<std::size_t>(x_hat->size())), target,
      spec.t, spec.criterion);
}

bool full_slot_trial_fails(const SingletonSpec& spec, std::int64_t trial) {
  RandomStream rng(spec.seed, singleton_stream_id(spec, trial));
  SystemConfig cfg;
  cfg.k_a = spec.a_total;
  cfg.m = spec.m;
  cfg.n_slots = 1;
  cfg.n_p = spec.n_p;
  cfg.n_d = spec.n_d;
  cfg.r = 1;
  cfg.noise_var = spec.noise_var;
  cfg.t = spec.t;

  // User 0 is the probed singleton on pilot 0, users 1 .. |A^j|-1 share it,
  // the rest pick uniformly among the other pilots.
  std::vector<UserPlan> plans(static_cast<std::size_t>(spec.a_total));
  for (int u = 0; u < spec.a_total; ++u) {
    UserPlan& plan = plans[static_cast<std::size_t>(u)];
    plan.user_id = u;
    plan.slot_indices = {0};
    plan.pilot_choice = {u < spec.a_pilot ? 0 : 1 + rng.uniform_index(spec.n_p - 1)};
    plan.payload_bits = random_bits(rng, 2 * spec.n_d);
    plan.payload = qpsk_modulate(plan.payload_bits);
  }
  const FrameInstance frame = assemble_frame(std::move(plans), cfg, rng);
  ReceiverState state = make_receiver_state(frame);
  ReceiverOptions options;
  options.criterion = spec.criterion;

  auto subtract = [&](int user) {
    state.decoded[static_cast<std::size_t>(user)] = 1;
    switch (spec.algorithm) {
      case Algorithm::kSnb:
        snb_subtract(state, frame, user, 0, SubtractionMode::kReplica, options);
        break;
      case Algorithm::kPab:
        pab_subtract(state, frame, user, 0, SubtractionMode::kReplica, options);
        break;
      case Algorithm::kPrce:
        prce_subtract(state, frame, user, 0, SubtractionMode::kReplica, options);
        break;
      case Algorithm::kLogical:
        throw Error(ErrorCode::kInvalidParameter, "singleton experiment needs SNB, PAB or PRCE");
    }
  };
  // Out-of-pilot users decoded elsewhere are removed first, then the sharers.
  const auto presubtracted =
      static_cast<int>(std::llround(spec.p * (spec.a_total - spec.a_pilot)));
  for (int u = spec.a_pilot; u < spec.a_pilot + presubtracted; ++u) subtract(u);
  for (int u = 1; u < spec.a_pilot; ++u) subtract(u);

  return attempt_decode(state, frame, 0, 0, options) != 0;
}

}  // namespace

bool singleton_trial_fails(const SingletonSpec& spec, std::int64_t trial) {
  const bool projected =
      spec.method == SingletonMethod::kProjected ||
      (spec.method == SingletonMethod::kAuto && spec.algorithm == Algorithm::kSnb);
  return projected ? projected_snb_trial_fails(spec, trial) : full_slot_trial_fails(spec, trial);
}

SingletonRecord run_singleton_experiment(const SingletonSpec& spec) {
  if (spec.a_pilot < 1 || spec.a_total < spec.a_pilot || !(spec.p >= 0.0 && spec.p <= 1.0) ||
      spec.trials < 1 || spec.m < 1 || spec.n_d < 1 || spec.t < 0 || spec.noise_var < 0.0) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("invalid singleton experiment (|A|={}, |A^j|={}, p={}, trials={})",
                            spec.a_total, spec.a_pilot, spec.p, spec.trials));
  }
  if (spec.algorithm == Algorithm::kLogical) {
    throw Error(ErrorCode::kInvalidParameter, "singleton experiment needs SNB, PAB or PRCE");
  }
  if (spec.method == SingletonMethod::kProjected && spec.algorithm != Algorithm::kSnb) {
    throw Error(ErrorCode::kInvalidParameter, "projected singleton trials model SNB only");
  }
  if (spec.a_total > spec.a_pilot && spec.n_p < 2) {
    throw Error(ErrorCode::kInvalidParameter, "out-of-pilot users need at least two pilots");
  }

  std::vector<std::uint8_t> failed(idx(spec.trials), 0);
  parallel_for(spec.trials, spec.workers,
               [&](std::int64_t i) { failed[idx(i)] = singleton_trial_fails(spec, i) ? 1 : 0; });

  SingletonRecord rec;
  rec.algorithm = spec.algorithm;
  rec.a_total = spec.a_total;
  rec.a_pilot = spec.a_pilot;
  rec.p = spec.p;
  rec.trials = spec.trials;
  for (auto f : failed) rec.failures += f;
  rec.fail_prob = static_cast<double>(rec.failures) / static_cast<double>(rec.trials);
  const WilsonInterval ci = wilson_interval(rec.failures, rec.trials);
  rec.ci_low = ci.low;
  rec.ci_high = ci.high;
  return rec;
}

}  // namespace csamimo
