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

#include "csamimo/frame.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

void validate(const SystemConfig& c) {
  if (c.n_p < 1 || !std::has_single_bit(static_cast<unsigned>(c.n_p))) {
    throw Error(ErrorCode::kUnsupportedPilotCount,
                fmt::format("n_p = {} is not a power of two", c.n_p));
  }
  if (c.k_a < 0 || c.m < 1 || c.n_slots < 1 || c.n_d < 1 || c.r < 1 || c.t < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("counts must be positive (k_a={}, m={}, n_slots={}, n_d={}, r={}, t={})",
                            c.k_a, c.m, c.n_slots, c.n_d, c.r, c.t));
  }
  if (c.r > c.n_slots) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("r = {} replicas do not fit in {} slots", c.r, c.n_slots));
  }
  if (!(c.noise_var >= 0.0) || !(c.channel_var > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("noise_var must be >= 0 and channel_var > 0 (got {}, {})",
                            c.noise_var, c.channel_var));
  }
}

int compute_slot_count(double latency_ms, double symbol_rate, int n_p, int n_d) {
  if (!(latency_ms > 0.0) || !(symbol_rate > 0.0) || n_p < 1 || n_d < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("slot budget needs positive arguments (latency={} ms, rate={}, "
                            "n_p={}, n_d={})",
                            latency_ms, symbol_rate, n_p, n_d));
  }
  const double latency_symbols = latency_ms * symbol_rate / 1000.0;
  return static_cast<int>(std::floor(latency_symbols / (2.0 * (n_p + n_d))));
}

int UserPlan::replica_in_slot(int slot) const noexcept {
  const auto it = std::find(slot_indices.begin(), slot_indices.end(), slot);
  return it == slot_indices.end() ? -1 : static_cast<int>(it - slot_indices.begin());
}

const ChannelVector& FrameInstance::true_channel(int user, int slot) const {
  const int replica = plans.at(static_cast<std::size_t>(user)).replica_in_slot(slot);
  if (replica < 0) {
    throw std::out_of_range(fmt::format("user {} has no replica in slot {}", user, slot));
  }
  return true_channels[static_cast<std::size_t>(user)][static_cast<std::size_t>(replica)];
}

std::vector<UserPlan> generate_user_plans(const SystemConfig& config, RandomStream& rng) {
  validate(config);
  std::vector<int> all_slots(static_cast<std::size_t>(config.n_slots));
  std::iota(all_slots.begin(), all_slots.end(), 0);

  std::vector<UserPlan> plans(static_cast<std::size_t>(config.k_a));
  for (int k = 0; k < config.k_a; ++k) {
    UserPlan& plan = plans[static_cast<std::size_t>(k)];
    plan.user_id = k;
    plan.slot_indices.reserve(static_cast<std::size_t>(config.r));
    // Selection sampling: uniform r-subset, emitted in ascending order.
    std::sample(all_slots.begin(), all_slots.end(), std::back_inserter(plan.slot_indices),
                config.r, rng.engine());
    plan.pilot_choice.resize(static_cast<std::size_t>(config.r));
    for (auto& pilot : plan.pilot_choice) pilot = rng.uniform_index(config.n_p);
    plan.payload_bits = random_bits(rng, 2 * config.n_d);
    plan.payload = qpsk_modulate(plan.payload_bits);
  }
  return plans;
}

std::vector<std::vector<Transmission>> build_occupancy(const SystemConfig& config,
                                                      std::span<const UserPlan> plans) {
  std::vector<std::vector<Transmission>> occupancy(static_cast<std::size_t>(config.n_slots));
  for (const UserPlan& plan : plans) {
    for (int i = 0; i < plan.replica_count(); ++i) {
      const int slot = plan.slot_indices[static_cast<std::size_t>(i)];
      if (slot < 0 || slot >= config.n_slots) {
        throw Error(ErrorCode::kInvalidInput,
                    fmt::format("user {} uses slot {} outside [0, {})", plan.user_id, slot,
                                config.n_slots));
      }
      occupancy[static_cast<std::size_t>(slot)].push_back(
          {plan.user_id, i, plan.pilot_choice[static_cast<std::size_t>(i)]});
    }
  }
  return occupancy;
}

FrameInstance assemble_frame(std::vector<UserPlan> plans, const SystemConfig& config,
                             RandomStream& rng) {
  validate(config);
  for (std::size_t k = 0; k < plans.size(); ++k) {
    if (plans[k].user_id != static_cast<int>(k)) {
      throw Error(ErrorCode::kInvalidInput, "user ids must be 0..K_a-1 in order");
    }
    if (plans[k].payload.size() != config.n_d) {
      throw Error(ErrorCode::kInvalidInput,
                  fmt::format("user {} payload has {} symbols, expected {}", k,
                              plans[k].payload.size(), config.n_d));
    }
  }

  FrameInstance frame{config, build_hadamard_pilots(config.n_p), std::move(plans), {}, {}, {}};
  frame.occupancy = build_occupancy(config, frame.plans);

  frame.true_channels.resize(frame.plans.size());
  for (std::size_t k = 0; k < frame.plans.size(); ++k) {
    auto& per_replica = frame.true_channels[k];
    per_replica.reserve(frame.plans[k].slot_indices.size());
    for (std::size_t i = 0; i < frame.plans[k].slot_indices.size(); ++i) {
      per_replica.push_back(draw_channel_vector(rng, config.m, config.channel_var));
    }
  }

  frame.slots.resize(static_cast<std::size_t>(config.n_slots));
  for (int s = 0; s < config.n_slots; ++s) {
    SlotSignal& slot = frame.slots[static_cast<std::size_t>(s)];
    slot.p = draw_noise_matrix(rng, config.m, config.n_p, config.noise_var);
    slot.y = draw_noise_matrix(rng, config.m, config.n_d, config.noise_var);

    const auto& txs = frame.occupancy[static_cast<std::size_t>(s)];
    if (txs.empty()) continue;
    const auto n = static_cast<Eigen::Index>(txs.size());
    CMatrix h(config.m, n);
    CMatrix pilots(n, config.n_p);
    CMatrix payloads(n, config.n_d);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Transmission& tx = txs[static_cast<std::size_t>(c)];
      h.col(c) = frame.true_channels[static_cast<std::size_t>(tx.user)]
                                    [static_cast<std::size_t>(tx.replica)];
      pilots.row(c) = frame.pilots.sequence(tx.pilot);
      payloads.row(c) = frame.plans[static_cast<std::size_t>(tx.user)].payload;
    }
    slot.p.noalias() += h * pilots;
    slot.y.noalias() += h * payloads;
  }
  return frame;
}

FrameInstance generate_frame(const SystemConfig& config, RandomStream& rng) {
  auto plans = generate_user_plans(config, rng);
  return assemble_frame(std::move(plans), config, rng);
}

}  // namespace csamimo
