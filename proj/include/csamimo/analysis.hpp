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

#include <vector>

namespace csamimo {

/// One slot seen from the probed pilot j: |A| users in total, |A^j| of them on
/// pilot j, |A^j| - 1 of which were decoded elsewhere and subtracted.
struct InterferenceScenario {
  int m = 256;
  int a_total = 1;
  int a_pilot = 1;
  int n_d = 256;
  int t = 10;
};

/// N_it = |A^j| * |A| - 1.
int interference_term_count(int a_pilot, int a_total);

/// QPSK symbol error probability when the MRC output of a singleton carries
/// n_it Gaussian interference terms, each of variance M before the 1/M
/// normalisation (noise neglected).
double symbol_error_probability(int m, int n_it);

/// P(Binomial(n, p) > t), log-domain terms with compensated summation.
double binomial_upper_tail(int n, int t, double p);

/// Probability that bounded-distance decoding (t correctable symbol errors
/// out of n_d) fails for the singleton of `scenario`.
double singleton_failure_probability(const InterferenceScenario& scenario);

/// Per-entry variance (|A| - 1) / N_D of the payload-aided channel estimate.
double pab_estimate_error_variance(int a_total, int n_d);

struct FailureCurvePoint {
  int a_total = 0;
  int a_pilot = 0;
  int m = 0;
  int n_d = 0;
  int t = 0;
  double p_e = 0.0;
  double p_fail = 0.0;
};

std::vector<FailureCurvePoint> failure_curve(int m, int n_d, int t, int a_pilot,
                                             const std::vector<int>& a_range);

/// Interpolated |A| at which `p_fail` first reaches `level` on a curve sorted
/// by a_total; NaN if the curve never reaches it.
double crossing_point(const std::vector<FailureCurvePoint>& curve, double level = 0.5);

}  // namespace csamimo
