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

#ifndef SUBSHEET_BRANCH_HPP
#define SUBSHEET_BRANCH_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subsheet {

// The two one-parameter families of Bernstein functions handled by this
// library. Homographic: f_a(x) = x e^a / (1 + x (e^a - 1)), whose fixed-t
// level diffusion carries a linear drift. Besq: g_a(x) = x / (1 + a x),
// whose level diffusion is the driftless squared Bessel of dimension 0.
enum class BranchKind { Homographic, Besq };

// Drift indicator of the level diffusion: 1 for Homographic, 0 for Besq.
inline constexpr double drift_theta(BranchKind kind) {
  return kind == BranchKind::Homographic ? 1.0 : 0.0;
}

inline const char* branch_name(BranchKind kind) {
  return kind == BranchKind::Homographic ? "homographic" : "besq";
}

// A Bernstein function of Moebius type, lambda -> alpha*lambda /
// (gamma*lambda + delta), stored as the nonzero entries of the 2x2 matrix
// [[alpha, 0], [gamma, delta]]. Maps fixing 0 have a zero upper-right entry,
// so composition is plain matrix multiplication and stays exact up to
// floating point rounding. Constructors normalize delta to 1.
struct MobiusMap {
  double alpha = 1.0;
  double gamma = 0.0;
  double delta = 1.0;
};

inline MobiusMap make_mobius(double alpha, double gamma, double delta) {
  if (!(alpha > 0.0) || !(delta > 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("MobiusMap: need alpha>0, delta>0, gamma>=0");
  }
  return MobiusMap{alpha / delta, gamma / delta, 1.0};
}

// The branch map of parameter a >= 0.
// Homographic: (alpha, gamma, delta) = (e^a, e^a - 1, 1).
// Besq:        (alpha, gamma, delta) = (1, a, 1).
inline MobiusMap mobius(BranchKind kind, double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("mobius: a must be >= 0");
  if (kind == BranchKind::Homographic) {
    return MobiusMap{std::exp(a), std::expm1(a), 1.0};
  }
  return MobiusMap{1.0, a, 1.0};
}

// Evaluates the Laplace exponent lambda -> alpha*lambda/(gamma*lambda+delta).
inline double apply_exponent(const MobiusMap& m, double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("apply_exponent: lambda must be >= 0");
  }
  if (std::isinf(lambda)) {
    return m.gamma > 0.0 ? m.alpha / m.gamma
                         : std::numeric_limits<double>::infinity();
  }
  return m.alpha * lambda / (m.gamma * lambda + m.delta);
}

// outer o inner as a matrix product, renormalized to delta = 1.
inline MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner) {
  const double alpha = outer.alpha * inner.alpha;
  const double gamma = outer.gamma * inner.alpha + outer.delta * inner.gamma;
  const double delta = outer.delta * inner.delta;
  return MobiusMap{alpha / delta, gamma / delta, 1.0};
}

// Compound-Poisson description of a branch subordinator: jumps arrive at
// `rate` per unit time and are exponential with mean `jump_mean`. The
// implied Laplace exponent rate * lambda * c / (1 + lambda * c) coincides
// with apply_exponent(mobius(kind, a), .).
struct JumpLaw {
  double rate = 0.0;
  double jump_mean = 1.0;
};

inline double jump_law_exponent(const JumpLaw& law, double lambda) {
  const double lc = lambda * law.jump_mean;
  return law.rate * lc / (1.0 + lc);
}

// Jump description of the parameter-a subordinator.
// Homographic: rate = e^a/(e^a - 1), jump_mean = e^a - 1.
// Besq:        rate = 1/a,           jump_mean = a.
// a = 0 is rejected: that subordinator is the deterministic Y_t = t and is
// handled by callers, never as a JumpLaw.
inline JumpLaw levy_of(BranchKind kind, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("levy_of: a must be > 0");
  if (kind == BranchKind::Homographic) {
    const double em1 = std::expm1(a);
    return JumpLaw{std::exp(a) / em1, em1};
  }
  return JumpLaw{1.0 / a, a};
}

}  // namespace subsheet

#endif  // SUBSHEET_BRANCH_HPP
