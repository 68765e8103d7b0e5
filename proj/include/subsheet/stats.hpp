// Copyright 2026 the subsheet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBSHEET_STATS_HPP
#define SUBSHEET_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace subsheet {

// Sample mean with its standard error (sample sd / sqrt(n)).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Partial sums that merge associatively, so chunked estimators combine to
// the same Estimate in any chunk layout as long as the merge order is fixed.
struct MomentAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void merge(const MomentAccumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    n += other.n;
  }
  Estimate estimate() const {
    if (n < 2) throw std::invalid_argument("estimate: need n >= 2");
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                          static_cast<double>(n - 1));
    return Estimate{mean, std::sqrt(var / static_cast<double>(n)),  n};
  }
};

inline Estimate mc_estimate(std::span<const double> samples) {
  MomentAccumulator acc;
  for (double x : samples) acc.add(x);
  return acc.estimate();
}

// z-score of an estimate against an analytic target. A zero standard error
// only passes when the match is exact.
inline double z_score(const Estimate& est, double analytic) {
  const double diff = est.mean - analytic;
  if (est.std_error == 0.0) {
    return std::abs(diff) <= 1e-14 * std::max(1.0, std::abs(analytic))
               ? 0.0
               : std::numeric_limits<double>::infinity();
  }
  return diff / est.std_error;
}

// Kolmogorov tail Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 101; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) * k * x * x);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double d = 0.0;  // sup |F1 - F2|
  double p = 0.0;  // asymptotic two-sided p-value
};

// Two-sample Kolmogorov-Smirnov test. Tied blocks are consumed whole on
// both sides before the gap is measured, which keeps the statistic correct
// for distributions with atoms (the p-value is then conservative).
inline KsResult ks2(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("ks2: both samples must be nonempty");
  }
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (i < a.size() && j < b.size()) {
      v = std::min(a[i], b[j]);
    } else if (i < a.size()) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }

  const double ne = std::sqrt(na * nb / (na + nb));
  const double lam = (ne + 0.12 + 0.11 / ne) * d;
  return KsResult{d, kolmogorov_tail(lam)};
}

namespace detail {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction
// split at x = a + 1.
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  }
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int it = 0; it < 500; ++it) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b0 = x + 1.0 - a;
  double c = 1.0 / 1e-300;
  double dd = 1.0 / b0;
  double h = dd;
  for (int it = 1; it < 500; ++it) {
    const double an = -static_cast<double>(it) * (static_cast<double>(it) - a);
    b0 += 2.0;
    dd = an * dd + b0;
    if (std::abs(dd) < 1e-300) dd = 1e-300;
    c = b0 + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    dd = 1.0 / dd;
    const double delta = dd * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

// Upper-tail p-value of a chi-square statistic with the given degrees of
// freedom.
inline double chi_square_tail(double stat, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("chi_square_tail: dof <= 0");
  if (stat <= 0.0) return 1.0;
  return detail::gamma_q(dof / 2.0, stat / 2.0);
}

}  // namespace subsheet

#endif  // SUBSHEET_STATS_HPP
