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
#include <string_view>
#include <vector>

#include "csamimo/frame.hpp"
#include "csamimo/receiver.hpp"

namespace csamimo {

/// Interference subtraction flavours.
///   kSnb     - squared-norm based: edits only f_j and g_j of the decoded
///              user's pilot, assuming ||h||^2 = M in replica slots.
///   kPab     - payload aided: re-estimates the channel from the decoded
///              payload and removes the full contribution from P and Y.
///   kPrce    - as kPab but with the true channel (ideal subtraction).
///   kLogical - collision-model peeling; no signal processing.
enum class Algorithm { kSnb, kPab, kPrce, kLogical };

const char* to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view text);

enum class SubtractionMode { kGenerator, kReplica };

/// How PAB/PRCE refresh pilot statistics after touching P and Y.
///   kRankOne - exact algebraic update of phi, f and g (default).
///   kFull    - recompute every statistic of the slot from the residuals.
enum class StatisticsRefresh { kRankOne, kFull };

struct ReceiverOptions {
  DecodeCriterion criterion = DecodeCriterion::kBit;
  /// SNB: also update f/g in the generator slot using the measured g_j.
  bool snb_generator_update = true;
  StatisticsRefresh refresh = StatisticsRefresh::kRankOne;
};

struct ReceiverState {
  std::vector<SlotSignal> residual_slots;
  std::vector<SlotStatistics> pilot_stats;
  std::vector<std::uint8_t> decoded;            // per user
  std::vector<std::vector<std::uint8_t>> subtracted;  // [user][replica]
  /// pending[slot][pilot]: statistics changed since the last decode attempt.
  std::vector<std::vector<std::uint8_t>> pending;
  /// f_stale[slot][pilot]: row f_j must be recomputed as phi_j^H Y before use.
  std::vector<std::vector<std::uint8_t>> f_stale;
  int decoded_count = 0;
  int n_up = 0;
  int n_pa = 0;
  int sweep_count = 0;
};

struct DecodeReport {
  int decoded_count = 0;
  int lost_count = 0;
  std::vector<std::uint8_t> user_decoded;
  int sweep_count = 0;
  int n_up = 0;
  int n_pa = 0;
};

/// Fresh state: residuals equal the received slots and all pilot statistics
/// are computed from them.
ReceiverState make_receiver_state(const FrameInstance& frame);

/// Attempts to decode pilot `pilot` of `slot` against its undecoded users.
/// Returns the decoded user id or -1. Does not subtract anything.
int attempt_decode(ReceiverState& state, const FrameInstance& frame, int slot, int pilot,
                   const ReceiverOptions& options = {});

void snb_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                  SubtractionMode mode, const ReceiverOptions& options = {});

/// h_hat = Y x^H / ||x||^2 from the current residual payload block.
ChannelVector pab_channel_estimate(const CMatrix& y_residual, const QpskSequence& payload);

void pab_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                  SubtractionMode mode, const ReceiverOptions& options = {});

void prce_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                   SubtractionMode mode, const ReceiverOptions& options = {});

/// Removes h s(user) from P and h x(user) from Y in `slot` and refreshes the
/// slot's statistics. Shared by PAB and PRCE.
void subtract_contribution(ReceiverState& state, const FrameInstance& frame, int slot,
                           int pilot, const ChannelVector& h, const QpskSequence& payload,
                           StatisticsRefresh refresh);

/// Iterative receiver (SNB, PAB or PRCE) returning its final state.
ReceiverState run_sis(const FrameInstance& frame, Algorithm algorithm,
                      const ReceiverOptions& options = {});

/// Iterative receiver: sweeps slots and pilots in ascending order, applies the
/// algorithm's subtraction to every replica as soon as a user decodes, and
/// stops once a sweep brings no new decode.
DecodeReport run_receiver(const FrameInstance& frame, Algorithm algorithm,
                          const ReceiverOptions& options = {});

/// Peeling on the user / (slot, pilot) graph; needs no signals.
DecodeReport logical_peel(const SystemConfig& config, std::span<const UserPlan> plans);
DecodeReport logical_peel(const FrameInstance& frame);

}  // namespace csamimo
