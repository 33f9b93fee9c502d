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

#include "csamimo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

int interference_term_count(int a_pilot, int a_total) {
  if (a_pilot < 1 || a_total < a_pilot) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("need |A| >= |A^j| >= 1 (|A|={}, |A^j|={})", a_total, a_pilot));
  }
  return a_pilot * a_total - 1;
}

double symbol_error_probability(int m, int n_it) {
  if (m < 1 || n_it < 0) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("need m >= 1 and n_it >= 0 (m={}, n_it={})", m, n_it));
  }
  if (n_it == 0) return 0.0;
  const double e = std::erfc(std::sqrt(static_cast<double>(m) / (2.0 * n_it)));
  return e - 0.25 * e * e;
}

double binomial_upper_tail(int n, int t, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("binomial tail needs n >= 0 and p in [0, 1] (n={}, p={})", n, p));
  }
  if (t < 0) return 1.0;
  if (t >= n || p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double log_q = std::log1p(-p);
  const double log_odds = std::log(p) - log_q;
  // log of C(n, d) p^d (1-p)^(n-d), advanced by the ratio of successive terms.
  double log_term = n * log_q;
  CompensatedSum lower;
  for (int d = 0; d <= t; ++d) {
    lower.add(std::exp(log_term));
    log_term += std::log(static_cast<double>(n - d) / (d + 1)) + log_odds;
  }
  if (lower.value() <= 0.5) return std::clamp(1.0 - lower.value(), 0.0, 1.0);

  // Small tail: sum it directly so the result keeps its relative accuracy.
  CompensatedSum upper;
  const double mean = n * p;
  for (int d = t + 1; d <= n; ++d) {
    const double term = std::exp(log_term);
    upper.add(term);
    if (d > mean && term < 1e-20 * upper.value()) break;
    log_term += std::log(static_cast<double>(n - d) / (d + 1)) + log_odds;
  }
  return std::clamp(upper.value(), 0.0, 1.0);
}

double singleton_failure_probability(const InterferenceScenario& s) {
  if (s.m < 1 || s.n_d < 1 || s.t < 0) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("need m >= 1, n_d >= 1, t >= 0 (m={}, n_d={}, t={})", s.m, s.n_d,
                            s.t));
  }
  const int n_it = interference_term_count(s.a_pilot, s.a_total);
  return binomial_upper_tail(s.n_d, s.t, symbol_error_probability(s.m, n_it));
}

double pab_estimate_error_variance(int a_total, int n_d) {
  if (a_total < 1 || n_d < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                fmt::format("need |A| >= 1 and n_d >= 1 (|A|={}, n_d={})", a_total, n_d));
  }
  return static_cast<double>(a_total - 1) / n_d;
}

std::vector<FailureCurvePoint> failure_curve(int m, int n_d, int t, int a_pilot,
                                             const std::vector<int>& a_range) {
  std::vector<FailureCurvePoint> curve;
  curve.reserve(a_range.size());
  for (int a_total : a_range) {
    const InterferenceScenario s{m, a_total, a_pilot, n_d, t};
    const double p_e = symbol_error_probability(m, interference_term_count(a_pilot, a_total));
    curve.push_back({a_total, a_pilot, m, n_d, t, p_e, singleton_failure_probability(s)});
  }
  return curve;
}

double crossing_point(const std::vector<FailureCurvePoint>& curve, double level) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].p_fail < level) continue;
    if (i == 0) return curve[0].a_total;
    const auto& lo = curve[i - 1];
    const auto& hi = curve[i];
    const double w = (level - lo.p_fail) / (hi.p_fail - lo.p_fail);
    return lo.a_total + w * (hi.a_total - lo.a_total);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace csamimo
