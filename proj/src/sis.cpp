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

#include "csamimo/sis.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

/// Replica index of `user` in `slot`, after checking the subtraction contract.
int claim_replica(ReceiverState& state, const FrameInstance& frame, int user, int slot) {
  if (user < 0 || idx(user) >= frame.plans.size()) {
    throw std::logic_error(fmt::format("unknown user {}", user));
  }
  if (!state.decoded[idx(user)]) {
    throw std::logic_error(fmt::format("user {} subtracted before being decoded", user));
  }
  const int replica = frame.plans[idx(user)].replica_in_slot(slot);
  if (replica < 0) {
    throw std::logic_error(fmt::format("user {} has no replica in slot {}", user, slot));
  }
  auto& done = state.subtracted[idx(user)][idx(replica)];
  if (done) {
    throw std::logic_error(fmt::format("user {} already subtracted from slot {}", user, slot));
  }
  done = 1;
  return replica;
}

void count_subtraction(ReceiverState& state, SubtractionMode mode) {
  if (mode == SubtractionMode::kGenerator) {
    ++state.n_up;
  } else {
    ++state.n_pa;
  }
}

void refresh_f_row(ReceiverState& state, int slot, int pilot) {
  auto& stale = state.f_stale[idx(slot)][idx(pilot)];
  if (!stale) return;
  SlotStatistics& st = state.pilot_stats[idx(slot)];
  st.f.row(pilot).noalias() = st.phi.col(pilot).adjoint() * state.residual_slots[idx(slot)].y;
  stale = 0;
}

bool has_undecoded_user(const ReceiverState& state, const FrameInstance& frame, int slot,
                        int pilot) {
  for (const Transmission& tx : frame.occupancy[idx(slot)]) {
    if (tx.pilot == pilot && !state.decoded[idx(tx.user)]) return true;
  }
  return false;
}

void mark_slot_pending(ReceiverState& state, int slot) {
  auto& row = state.pending[idx(slot)];
  std::fill(row.begin(), row.end(), std::uint8_t{1});
}

void subtract_everywhere(ReceiverState& state, const FrameInstance& frame, Algorithm algorithm,
                         int user, int generator_slot, const ReceiverOptions& options) {
  const UserPlan& plan = frame.plans[idx(user)];
  auto apply = [&](int slot, SubtractionMode mode) {
    switch (algorithm) {
      case Algorithm::kSnb:
        snb_subtract(state, frame, user, slot, mode, options);
        break;
      case Algorithm::kPab:
        pab_subtract(state, frame, user, slot, mode, options);
        break;
      case Algorithm::kPrce:
        prce_subtract(state, frame, user, slot, mode, options);
        break;
      case Algorithm::kLogical:
        throw std::logic_error("logical peeling has no signal subtraction");
    }
  };
  if (algorithm != Algorithm::kSnb || options.snb_generator_update) {
    apply(generator_slot, SubtractionMode::kGenerator);
  }
  for (int slot : plan.slot_indices) {
    if (slot != generator_slot) apply(slot, SubtractionMode::kReplica);
  }
}

}  // namespace

const char* to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kSnb: return "SNB";
    case Algorithm::kPab: return "PAB";
    case Algorithm::kPrce: return "PRCE";
    case Algorithm::kLogical: return "LOGICAL";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string upper(text);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (upper == "SNB") return Algorithm::kSnb;
  if (upper == "PAB") return Algorithm::kPab;
  if (upper == "PRCE") return Algorithm::kPrce;
  if (upper == "LOGICAL" || upper == "LOGIC") return Algorithm::kLogical;
  throw Error(ErrorCode::kInvalidParameter,
              fmt::format("unknown algorithm '{}' (expected SNB, PAB, PRCE or LOGICAL)", text));
}

ReceiverState make_receiver_state(const FrameInstance& frame) {
  const SystemConfig& c = frame.config;
  ReceiverState state;
  state.residual_slots = frame.slots;
  state.pilot_stats.reserve(frame.slots.size());
  for (const SlotSignal& slot : frame.slots) {
    state.pilot_stats.push_back(compute_slot_statistics(slot, frame.pilots));
  }
  state.decoded.assign(frame.plans.size(), 0);
  state.subtracted.resize(frame.plans.size());
  for (std::size_t k = 0; k < frame.plans.size(); ++k) {
    state.subtracted[k].assign(frame.plans[k].slot_indices.size(), 0);
  }
  state.pending.assign(idx(c.n_slots), std::vector<std::uint8_t>(idx(c.n_p), 1));
  state.f_stale.assign(idx(c.n_slots), std::vector<std::uint8_t>(idx(c.n_p), 0));
  return state;
}

int attempt_decode(ReceiverState& state, const FrameInstance& frame, int slot, int pilot,
                   const ReceiverOptions& options) {
  if (!has_undecoded_user(state, frame, slot, pilot)) return -1;
  refresh_f_row(state, slot, pilot);
  const SlotStatistics& st = state.pilot_stats[idx(slot)];
  const auto x_hat =
      mrc_payload_estimate(st.f.row(pilot), st.g[pilot], no_estimate_threshold(frame.config.m));
  if (!x_hat) return -1;
  const std::span<const Complex> symbols(x_hat->data(), idx(static_cast<int>(x_hat->size())));
  for (const Transmission& tx : frame.occupancy[idx(slot)]) {
    if (tx.pilot != pilot || state.decoded[idx(tx.user)]) continue;
    if (genie_bounded_distance_decode(symbols, frame.plans[idx(tx.user)], frame.config.t,
                                      options.criterion)) {
      state.decoded[idx(tx.user)] = 1;
      ++state.decoded_count;
      return tx.user;
    }
  }
  return -1;
}

void snb_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                  SubtractionMode mode, const ReceiverOptions& /*options*/) {
  const int replica = claim_replica(state, frame, user, slot);
  const int pilot = frame.plans[idx(user)].pilot_choice[idx(replica)];
  refresh_f_row(state, slot, pilot);
  SlotStatistics& st = state.pilot_stats[idx(slot)];
  // Generator slot: the measured g_j is the best estimate of ||h||^2.
  // Replica slots: ||h||^2 / M -> 1 for large M.
  const double norm2 = mode == SubtractionMode::kGenerator
                           ? st.g[pilot]
                           : frame.config.m * frame.config.channel_var;
  st.f.row(pilot) -= norm2 * frame.plans[idx(user)].payload;
  st.g[pilot] -= norm2;
  state.pending[idx(slot)][idx(pilot)] = 1;
  count_subtraction(state, mode);
}

ChannelVector pab_channel_estimate(const CMatrix& y_residual, const QpskSequence& payload) {
  const double energy = payload.squaredNorm();
  if (!(energy > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "payload has zero energy");
  }
  if (payload.size() != y_residual.cols()) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("payload has {} symbols, Y has {} columns", payload.size(),
                            y_residual.cols()));
  }
  ChannelVector h = y_residual * payload.adjoint();
  h /= energy;
  return h;
}

void subtract_contribution(ReceiverState& state, const FrameInstance& frame, int slot,
                           int pilot, const ChannelVector& h, const QpskSequence& payload,
                           StatisticsRefresh refresh) {
  SlotSignal& sig = state.residual_slots[idx(slot)];
  sig.p.noalias() -= h * frame.pilots.sequence(pilot);
  sig.y.noalias() -= h * payload;

  SlotStatistics& st = state.pilot_stats[idx(slot)];
  if (refresh == StatisticsRefresh::kFull) {
    st = compute_slot_statistics(sig, frame.pilots);
    auto& stale = state.f_stale[idx(slot)];
    std::fill(stale.begin(), stale.end(), std::uint8_t{0});
  } else {
    // Orthogonal pilots: only phi_j moves (by -h). Every f_i loses
    // (phi_i^H h) x; f_j additionally loses h^H Y_new, applied lazily.
    const CVector overlap = st.phi.adjoint() * h;
    st.f.noalias() -= overlap * payload;
    st.phi.col(pilot) -= h;
    st.g[pilot] = st.phi.col(pilot).squaredNorm();
    state.f_stale[idx(slot)][idx(pilot)] = 1;
  }
  mark_slot_pending(state, slot);
}

void pab_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                  SubtractionMode mode, const ReceiverOptions& options) {
  const int replica = claim_replica(state, frame, user, slot);
  const UserPlan& plan = frame.plans[idx(user)];
  const int pilot = plan.pilot_choice[idx(replica)];
  // Generator slot: the singleton estimate phi_j measured at decode time.
  const ChannelVector h = mode == SubtractionMode::kGenerator
                              ? ChannelVector(state.pilot_stats[idx(slot)].phi.col(pilot))
                              : pab_channel_estimate(state.residual_slots[idx(slot)].y,
                                                     plan.payload);
  subtract_contribution(state, frame, slot, pilot, h, plan.payload, options.refresh);
  count_subtraction(state, mode);
}

void prce_subtract(ReceiverState& state, const FrameInstance& frame, int user, int slot,
                   SubtractionMode mode, const ReceiverOptions& options) {
  const int replica = claim_replica(state, frame, user, slot);
  const UserPlan& plan = frame.plans[idx(user)];
  subtract_contribution(state, frame, slot, plan.pilot_choice[idx(replica)],
                        frame.true_channels[idx(user)][idx(replica)], plan.payload,
                        options.refresh);
  count_subtraction(state, mode);
}

namespace {

DecodeReport make_report(std::vector<std::uint8_t> decoded, int decoded_count, int sweeps,
                         int n_up, int n_pa) {
  DecodeReport report;
  report.decoded_count = decoded_count;
  report.lost_count = static_cast<int>(decoded.size()) - decoded_count;
  report.user_decoded = std::move(decoded);
  report.sweep_count = sweeps;
  report.n_up = n_up;
  report.n_pa = n_pa;
  return report;
}

}  // namespace

ReceiverState run_sis(const FrameInstance& frame, Algorithm algorithm,
                      const ReceiverOptions& options) {
  if (algorithm == Algorithm::kLogical) {
    throw Error(ErrorCode::kInvalidParameter, "logical peeling has no signal-level state");
  }
  ReceiverState state = make_receiver_state(frame);
  const int n_slots = frame.config.n_slots;
  const int n_p = frame.config.n_p;
  // A decode attempt on unchanged statistics repeats the previous outcome, so
  // each sweep only revisits (slot, pilot) pairs touched since their last try.
  bool progress = true;
  while (progress) {
    progress = false;
    bool attempted = false;
    for (int s = 0; s < n_slots; ++s) {
      for (int j = 0; j < n_p; ++j) {
        auto& pending = state.pending[idx(s)][idx(j)];
        if (!pending) continue;
        pending = 0;
        if (!has_undecoded_user(state, frame, s, j)) continue;
        attempted = true;
        const int user = attempt_decode(state, frame, s, j, options);
        if (user < 0) continue;
        progress = true;
        subtract_everywhere(state, frame, algorithm, user, s, options);
      }
    }
    if (attempted) ++state.sweep_count;
  }
  return state;
}

DecodeReport run_receiver(const FrameInstance& frame, Algorithm algorithm,
                          const ReceiverOptions& options) {
  if (algorithm == Algorithm::kLogical) return logical_peel(frame);
  ReceiverState state = run_sis(frame, algorithm, options);
  return make_report(std::move(state.decoded), state.decoded_count, state.sweep_count,
                     state.n_up, state.n_pa);
}

DecodeReport logical_peel(const SystemConfig& config, std::span<const UserPlan> plans) {
  validate(config);
  const auto occupancy = build_occupancy(config, plans);
  const std::size_t n_slots = idx(config.n_slots);
  const std::size_t n_p = idx(config.n_p);

  std::vector<std::vector<int>> undecoded(n_slots, std::vector<int>(n_p, 0));
  for (std::size_t s = 0; s < n_slots; ++s) {
    for (const Transmission& tx : occupancy[s]) ++undecoded[s][idx(tx.pilot)];
  }
  std::vector<std::vector<std::uint8_t>> pending(n_slots, std::vector<std::uint8_t>(n_p, 1));
  std::vector<std::uint8_t> decoded(plans.size(), 0);
  int decoded_count = 0;
  int sweeps = 0;
  int n_up = 0;
  int n_pa = 0;

  bool progress = true;
  while (progress) {
    progress = false;
    bool attempted = false;
    for (std::size_t s = 0; s < n_slots; ++s) {
      for (std::size_t j = 0; j < n_p; ++j) {
        if (!pending[s][j] || undecoded[s][j] == 0) continue;
        pending[s][j] = 0;
        attempted = true;
        if (undecoded[s][j] != 1) continue;
        int user = -1;
        for (const Transmission& tx : occupancy[s]) {
          if (idx(tx.pilot) == j && !decoded[idx(tx.user)]) user = tx.user;
        }
        decoded[idx(user)] = 1;
        ++decoded_count;
        progress = true;
        const UserPlan& plan = plans[idx(user)];
        for (int i = 0; i < plan.replica_count(); ++i) {
          const auto rs = idx(plan.slot_indices[idx(i)]);
          const auto rj = idx(plan.pilot_choice[idx(i)]);
          --undecoded[rs][rj];
          pending[rs][rj] = 1;
          if (rs == s) {
            ++n_up;
          } else {
            ++n_pa;
          }
        }
      }
    }
    if (attempted) ++sweeps;
  }
  return make_report(std::move(decoded), decoded_count, sweeps, n_up, n_pa);
}

DecodeReport logical_peel(const FrameInstance& frame) {
  return logical_peel(frame.config, frame.plans);
}

}  // namespace csamimo
