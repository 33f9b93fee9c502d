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

#include "csamimo/signal.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kUnsupportedPilotCount: return "unsupported-pilot-count";
    case ErrorCode::kInvalidLength: return "invalid-length";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXi sylvester_matrix(Eigen::Index n) {
  Eigen::MatrixXi h(1, 1);
  h(0, 0) = 1;
  while (h.rows() < n) {
    const Eigen::Index k = h.rows();
    Eigen::MatrixXi next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

}  // namespace

PilotSet::PilotSet(Eigen::MatrixXi rows)
    : rows_(std::move(rows)), symbols_(rows_.cast<double>().cast<Complex>()) {
  const auto n = rows_.rows();
  sylvester_ = n > 0 && n == rows_.cols() && std::has_single_bit(static_cast<std::uint64_t>(n)) &&
               rows_ == sylvester_matrix(n);
}

ChannelVector draw_channel_vector(RandomStream& rng, int m, double var) {
  if (m < 1 || !(var > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("channel draw needs m >= 1 and var > 0 (m={}, var={})", m, var));
  }
  ChannelVector h(m);
  for (int i = 0; i < m; ++i) h[i] = rng.complex_normal(var);
  return h;
}

CMatrix draw_noise_matrix(RandomStream& rng, int rows, int cols, double var) {
  if (rows < 1 || cols < 1 || var < 0.0) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("noise matrix needs positive dimensions and var >= 0 "
                            "(rows={}, cols={}, var={})",
                            rows, cols, var));
  }
  if (var == 0.0) return CMatrix::Zero(rows, cols);
  CMatrix z(rows, cols);
  // Column-major fill keeps the draw order tied to the storage order.
  Complex* data = z.data();
  const Eigen::Index n = z.size();
  for (Eigen::Index i = 0; i < n; ++i) data[i] = rng.complex_normal(var);
  return z;
}

PilotSet build_hadamard_pilots(int n_p) {
  if (n_p < 1 || !std::has_single_bit(static_cast<unsigned>(n_p))) {
    throw Error(ErrorCode::kUnsupportedPilotCount,
                fmt::format("pilot count {} is not a power of two", n_p));
  }
  return PilotSet(sylvester_matrix(n_p));
}

QpskSequence qpsk_modulate(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) {
    throw Error(ErrorCode::kInvalidLength,
                fmt::format("QPSK needs an even number of bits, got {}", bits.size()));
  }
  const double a = 1.0 / std::sqrt(2.0);
  QpskSequence x(static_cast<Eigen::Index>(bits.size() / 2));
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double re = bits[2 * n] ? -a : a;
    const double im = bits[2 * n + 1] ? -a : a;
    x[n] = Complex(re, im);
  }
  return x;
}

Bits qpsk_hard_demodulate(std::span<const Complex> symbols) {
  Bits bits(2 * symbols.size());
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    bits[2 * n] = symbols[n].real() < 0.0 ? 1 : 0;
    bits[2 * n + 1] = symbols[n].imag() < 0.0 ? 1 : 0;
  }
  return bits;
}

Bits random_bits(RandomStream& rng, int count) {
  Bits bits(static_cast<std::size_t>(count));
  for (auto& b : bits) b = rng.bit() ? 1 : 0;
  return bits;
}

}  // namespace csamimo
