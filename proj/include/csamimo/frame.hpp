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
#include <span>
#include <vector>

#include "csamimo/random.hpp"
#include "csamimo/signal.hpp"

namespace csamimo {

/// Scenario parameters. Defaults: 256 antennas, 64 Hadamard pilots, 256 QPSK
/// payload symbols, 3 replicas, t = 10 and a 50 ms frame at 1 Msym/s
/// (78 slots).
struct SystemConfig {
  int k_a = 0;
  int m = 256;
  int n_slots = 78;
  int n_p = 64;
  int n_d = 256;
  int r = 3;
  double noise_var = 0.1;
  double channel_var = 1.0;
  int t = 10;
  double latency_ms = 50.0;
  double symbol_rate = 1.0e6;
};

/// Throws Error{kInvalidConfig} or Error{kUnsupportedPilotCount}.
void validate(const SystemConfig& config);

/// floor(latency * symbol_rate / (2 (n_p + n_d))), latency in milliseconds.
int compute_slot_count(double latency_ms, double symbol_rate, int n_p, int n_d);

struct UserPlan {
  int user_id = 0;
  std::vector<int> slot_indices;  // ascending, distinct
  std::vector<int> pilot_choice;  // one pilot per entry of slot_indices
  Bits payload_bits;              // 2 * n_d bits
  QpskSequence payload;           // identical in every replica

  int replica_count() const noexcept { return static_cast<int>(slot_indices.size()); }
  /// Replica index transmitted in `slot`, or -1.
  int replica_in_slot(int slot) const noexcept;
};

/// Received pilot block P (M x N_P) and payload block Y (M x N_D) of one slot.
struct SlotSignal {
  CMatrix p;
  CMatrix y;
};

struct Transmission {
  int user = 0;
  int replica = 0;
  int pilot = 0;
};

struct FrameInstance {
  SystemConfig config;
  PilotSet pilots;
  std::vector<UserPlan> plans;
  /// true_channels[user][replica]; independent draws per slot.
  std::vector<std::vector<ChannelVector>> true_channels;
  std::vector<SlotSignal> slots;
  /// occupancy[slot] lists every replica transmitted in that slot.
  std::vector<std::vector<Transmission>> occupancy;

  const ChannelVector& true_channel(int user, int slot) const;
};

std::vector<UserPlan> generate_user_plans(const SystemConfig& config, RandomStream& rng);

/// Per-slot transmission lists derived from the plans alone.
std::vector<std::vector<Transmission>> build_occupancy(const SystemConfig& config,
                                                      std::span<const UserPlan> plans);

/// Draws one channel per (user, replica), then the pilot and payload noise of
/// every slot, and superimposes the contributions.
FrameInstance assemble_frame(std::vector<UserPlan> plans, const SystemConfig& config,
                             RandomStream& rng);

/// Convenience: plans and signals from a single stream.
FrameInstance generate_frame(const SystemConfig& config, RandomStream& rng);

}  // namespace csamimo
