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

#include <Eigen/Dense>

#include "csamimo/random.hpp"

namespace csamimo {

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using CRowVector = Eigen::Matrix<Complex, 1, Eigen::Dynamic>;

/// Per-antenna channel gains of one user in one slot (length M).
using ChannelVector = CVector;

/// Unit-energy QPSK symbols of one payload (length N_D).
using QpskSequence = CRowVector;

using Bits = std::vector<std::uint8_t>;

/// N_P mutually orthogonal +/-1 sequences of length N_P, one per row.
class PilotSet {
 public:
  explicit PilotSet(Eigen::MatrixXi rows);

  int count() const noexcept { return static_cast<int>(rows_.rows()); }
  int length() const noexcept { return static_cast<int>(rows_.cols()); }

  const Eigen::MatrixXi& rows() const noexcept { return rows_; }
  /// Same rows as complex symbols, used by the signal model.
  const CMatrix& symbols() const noexcept { return symbols_; }
  auto sequence(int j) const { return symbols_.row(j); }

  /// True when the rows are the natural-order Sylvester Hadamard matrix,
  /// which allows correlating against all pilots with a fast transform.
  bool is_sylvester() const noexcept { return sylvester_; }

 private:
  Eigen::MatrixXi rows_;
  CMatrix symbols_;
  bool sylvester_ = false;
};

ChannelVector draw_channel_vector(RandomStream& rng, int m, double var);

/// rows x cols matrix of i.i.d. CN(0, var) samples. var == 0 gives zeros
/// without consuming randomness.
CMatrix draw_noise_matrix(RandomStream& rng, int rows, int cols, double var);

/// Sylvester-construction Hadamard pilots; n_p must be a power of two.
PilotSet build_hadamard_pilots(int n_p);

/// Gray-labelled QPSK: bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
QpskSequence qpsk_modulate(std::span<const std::uint8_t> bits);

/// Hard decision: b0 = [Re < 0], b1 = [Im < 0].
Bits qpsk_hard_demodulate(std::span<const Complex> symbols);

Bits random_bits(RandomStream& rng, int count);

}  // namespace csamimo
