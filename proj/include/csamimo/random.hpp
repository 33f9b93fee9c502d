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

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace csamimo {

using Complex = std::complex<double>;

/// Independent, reproducible random source for one simulation trial.
///
/// A stream is identified by (seed, stream_id). The pair is expanded with
/// std::seed_seq into the full engine state, so identical pairs give
/// identical draws no matter which worker runs the trial or in which order
/// trials are scheduled, and distinct pairs give decorrelated sequences.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  Engine& engine() noexcept { return engine_; }

  /// Standard normal sample (ziggurat, exact in distribution).
  double normal() { return normal_(engine_); }

  /// Circularly symmetric complex Gaussian with total variance `var`.
  Complex complex_normal(double var) {
    const double s = std::sqrt(0.5 * var);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
  }

  /// Uniform integer in [0, n).
  int uniform_index(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(engine_);
  }

  bool bit() { return (engine_() >> 63) != 0U; }

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  static Engine make_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9U};
    return Engine(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Engine engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace csamimo
