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

#include "csamimo/receiver.hpp"

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

CMatrix estimate_all_pilot_channels(const CMatrix& p, const PilotSet& pilots) {
  if (p.cols() != pilots.length()) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("pilot block has {} columns, pilots have length {}", p.cols(),
                            pilots.length()));
  }
  const Eigen::Index n = pilots.length();
  CMatrix phi;
  if (pilots.is_sylvester()) {
    // In-place Walsh-Hadamard butterflies over columns give P H (H symmetric).
    // Only sums, differences and a power-of-two scale: a lone user on pilot j
    // comes out as exactly h in column j and exactly 0 elsewhere.
    phi = p;
    CVector a(p.rows());
    for (Eigen::Index half = 1; half < n; half *= 2) {
      for (Eigen::Index block = 0; block < n; block += 2 * half) {
        for (Eigen::Index c = block; c < block + half; ++c) {
          a = phi.col(c);
          phi.col(c) += phi.col(c + half);
          phi.col(c + half) = a - phi.col(c + half);
        }
      }
    }
  } else {
    phi = p * pilots.symbols().adjoint();
  }
  // Rows of a Hadamard set are +/-1 with squared norm N_P.
  phi /= static_cast<double>(n);
  return phi;
}

PilotStatistic compute_combining_statistics(const ChannelVector& phi, const CMatrix& y) {
  if (phi.size() != y.rows()) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("phi has {} entries, Y has {} rows", phi.size(), y.rows()));
  }
  return {phi, phi.adjoint() * y, phi.squaredNorm()};
}

SlotStatistics compute_slot_statistics(const SlotSignal& slot, const PilotSet& pilots) {
  SlotStatistics stats;
  stats.phi = estimate_all_pilot_channels(slot.p, pilots);
  stats.f.noalias() = stats.phi.adjoint() * slot.y;
  stats.g = stats.phi.colwise().squaredNorm().transpose();
  return stats;
}

std::optional<QpskSequence> mrc_payload_estimate(const CRowVector& f, double g,
                                                 double threshold) {
  if (!(g > threshold)) return std::nullopt;
  return QpskSequence(f / g);
}

const char* to_string(DecodeCriterion criterion) noexcept {
  return criterion == DecodeCriterion::kBit ? "bit" : "symbol";
}

DecodeCriterion parse_decode_criterion(std::string_view text) {
  if (text == "bit") return DecodeCriterion::kBit;
  if (text == "symbol") return DecodeCriterion::kSymbol;
  throw Error(ErrorCode::kInvalidParameter,
              fmt::format("unknown decode criterion '{}' (expected bit or symbol)", text));
}

int count_decode_errors(std::span<const Complex> x_hat, const UserPlan& truth,
                        DecodeCriterion criterion) {
  if (x_hat.size() * 2 != truth.payload_bits.size()) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("estimate has {} symbols, payload has {} bits", x_hat.size(),
                            truth.payload_bits.size()));
  }
  int errors = 0;
  for (std::size_t n = 0; n < x_hat.size(); ++n) {
    const int e0 = (x_hat[n].real() < 0.0) != (truth.payload_bits[2 * n] != 0);
    const int e1 = (x_hat[n].imag() < 0.0) != (truth.payload_bits[2 * n + 1] != 0);
    errors += criterion == DecodeCriterion::kBit ? e0 + e1 : (e0 | e1);
  }
  return errors;
}

bool genie_bounded_distance_decode(std::span<const Complex> x_hat, const UserPlan& truth, int t,
                                   DecodeCriterion criterion) {
  return count_decode_errors(x_hat, truth, criterion) <= t;
}

}  // namespace csamimo
