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

#include <optional>
#include <span>
#include <string_view>

#include "csamimo/frame.hpp"
#include "csamimo/signal.hpp"

namespace csamimo {

/// Receiver state for one pilot: channel estimate phi_j, combined payload
/// f_j = phi_j^H Y and g_j = ||phi_j||^2.
struct PilotStatistic {
  ChannelVector phi;
  CRowVector f;
  double g = 0.0;
};

/// Statistics of every pilot of one slot, stored column/row-wise:
/// phi is M x N_P (column j is phi_j), f is N_P x N_D (row j is f_j).
struct SlotStatistics {
  CMatrix phi;
  CMatrix f;
  Eigen::VectorXd g;

  PilotStatistic pilot(int j) const { return {phi.col(j), f.row(j), g[j]}; }
};

/// phi_j = P s_j^H / ||s_j||^2 for every pilot j (returned as columns).
CMatrix estimate_all_pilot_channels(const CMatrix& p, const PilotSet& pilots);

PilotStatistic compute_combining_statistics(const ChannelVector& phi, const CMatrix& y);

SlotStatistics compute_slot_statistics(const SlotSignal& slot, const PilotSet& pilots);

/// Pilots whose g_j falls below this are treated as unused.
constexpr double no_estimate_threshold(int m) noexcept { return 1.0e-6 * m; }

/// x_hat = f / g, or nullopt when g is below `threshold`.
std::optional<QpskSequence> mrc_payload_estimate(const CRowVector& f, double g,
                                                 double threshold);

enum class DecodeCriterion { kBit, kSymbol };

const char* to_string(DecodeCriterion criterion) noexcept;
DecodeCriterion parse_decode_criterion(std::string_view text);

/// Hard-decision errors of x_hat against the transmitted payload, counted in
/// bits or in QPSK symbols.
int count_decode_errors(std::span<const Complex> x_hat, const UserPlan& truth,
                        DecodeCriterion criterion);

/// Bounded-distance decoding with a genie: the codeword is recovered iff the
/// hard-decision error count is at most t. A perfect CRC is assumed, so a
/// wrong codeword is never accepted.
bool genie_bounded_distance_decode(std::span<const Complex> x_hat, const UserPlan& truth, int t,
                                   DecodeCriterion criterion);

}  // namespace csamimo
