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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csamimo/frame.hpp"
#include "csamimo/sis.hpp"

namespace csamimo {

/// Runs fn(0) ... fn(n - 1) on `workers` threads (0 = hardware concurrency).
/// fn must only touch state owned by its index.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn);

int resolve_workers(int requested);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval; z = 1.96 gives 95 %.
WilsonInterval wilson_interval(std::int64_t events, std::int64_t trials,
                               double z = 1.959963984540054);

/// Stream id of frame `frame_index` at load `ka`. Independent of the
/// algorithm, so every algorithm sees the same frames.
std::uint64_t frame_stream_id(int ka, std::int64_t frame_index);

struct SweepSpec {
  SystemConfig config;
  std::vector<int> ka_values;
  std::vector<Algorithm> algorithms;
  std::int64_t min_frames = 1;
  std::int64_t max_frames = 1000;
  std::int64_t target_loss_events = 100;
  std::uint64_t base_seed = 1;
  int workers = 0;
  ReceiverOptions receiver;
  /// When false, wall_seconds is reported as 0 so output is byte-reproducible.
  bool record_wall_time = true;
};

void validate(const SweepSpec& spec);

struct PlrRecord {
  Algorithm algorithm = Algorithm::kSnb;
  std::string mac = "baseline";
  int ka = 0;
  std::int64_t frames_run = 0;
  std::int64_t packets_sent = 0;
  std::int64_t packets_lost = 0;
  double plr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_n_up = 0.0;
  double mean_n_pa = 0.0;
  double wall_seconds = 0.0;

  bool operator==(const PlrRecord&) const = default;
};

/// Monte Carlo packet loss rate of one (algorithm, K_a) point. Frames are
/// evaluated in index order; the run stops after max_frames, or at the first
/// frame (not before min_frames) at which target_loss_events is reached.
PlrRecord run_plr_point(const SweepSpec& spec, Algorithm algorithm, int ka);

using SweepProgress = std::function<void(const PlrRecord&)>;

std::vector<PlrRecord> run_plr_sweep(const SweepSpec& spec, const SweepProgress& progress = {});

/// Decoded-user counts of several algorithms on identical frames.
struct PairedFrames {
  std::vector<Algorithm> algorithms;
  /// decoded[a][f]: users decoded by algorithms[a] in frame f.
  std::vector<std::vector<int>> decoded;
  /// user_decoded[a][f][k]: per-user outcome behind decoded[a][f].
  std::vector<std::vector<std::vector<std::uint8_t>>> user_decoded;
};

PairedFrames run_paired_frames(const SystemConfig& config, int ka, std::int64_t frames,
                               const std::vector<Algorithm>& algorithms,
                               std::uint64_t base_seed, const ReceiverOptions& options = {},
                               int workers = 0);

/// kProjected samples the pilot-j statistics (phi_j, f_j, g_j) directly from
/// their exact joint law instead of building P and Y; valid for SNB only.
enum class SingletonMethod { kAuto, kFullSlot, kProjected };

struct SingletonSpec {
  int m = 256;
  int n_p = 64;
  int n_d = 256;
  int t = 10;
  double noise_var = 0.1;
  int a_pilot = 1;
  int a_total = 1;
  /// Fraction of the out-of-pilot users decoded elsewhere and subtracted
  /// (replica mode, worst case n_up = 0) before the singleton is attempted.
  double p = 0.0;
  std::int64_t trials = 10000;
  Algorithm algorithm = Algorithm::kSnb;
  DecodeCriterion criterion = DecodeCriterion::kBit;
  SingletonMethod method = SingletonMethod::kAuto;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct SingletonRecord {
  Algorithm algorithm = Algorithm::kSnb;
  int a_total = 0;
  int a_pilot = 0;
  double p = 0.0;
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  double fail_prob = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

SingletonRecord run_singleton_experiment(const SingletonSpec& spec);

/// Outcome of one singleton trial (true = decoding failed).
bool singleton_trial_fails(const SingletonSpec& spec, std::int64_t trial);

}  // namespace csamimo
