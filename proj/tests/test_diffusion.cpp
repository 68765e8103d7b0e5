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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "subsheet/diffusion.hpp"
#include "subsheet/stats.hpp"

using namespace subsheet;

TEST_CASE("exact_step absorbs at the origin and rejects bad input") {
  RngStream rng(1, 0);
  CHECK(exact_step(BranchKind::Homographic, 0.0, 1.0, rng) == 0.0);
  CHECK_THROWS_AS(exact_step(BranchKind::Homographic, -1.0, 1.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact_step(BranchKind::Homographic, 1.0, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("exact_step means: x e^{da} (homographic), x (besq)") {
  RngStream rng(2, 0);
  const int n = 400000;
  MomentAccumulator hom, besq;
  for (int i = 0; i < n; ++i) {
    hom.add(exact_step(BranchKind::Homographic, 1.0, std::log(2.0), rng));
    besq.add(exact_step(BranchKind::Besq, 1.0, 0.5, rng));
  }
  CHECK(std::abs(z_score(hom.estimate(), 2.0)) <= 3.0);
  CHECK(std::abs(z_score(besq.estimate(), 1.0)) <= 3.0);
}

TEST_CASE("euler_step stays at 0 and keeps the besq martingale mean") {
  RngStream rng(3, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(euler_step(BranchKind::Homographic, 0.0, 0.01, rng) == 0.0);
  }
  const int n = 50000;
  const int steps = 256;
  const double da = 0.5 / steps;
  MomentAccumulator acc;
  for (int i = 0; i < n; ++i) {
    double z = 1.0;
    for (int s = 0; s < steps; ++s) z = euler_step(BranchKind::Besq, z, da, rng);
    acc.add(z);
  }
  CHECK(std::abs(z_score(acc.estimate(), 1.0)) <= 3.0);
}

TEST_CASE("euler chain converges weakly to the exact transition (KS)") {
  RngStream rng(4, 0);
  const int n = 100000;
  const int steps = 2048;
  const double a = std::log(2.0);
  const double da = a / steps;
  std::vector<double> euler(n), exact(n);
  for (int i = 0; i < n; ++i) {
    double z = 1.0;
    for (int s = 0; s < steps; ++s) {
      z = euler_step(BranchKind::Homographic, z, da, rng);
    }
    euler[i] = z;
    exact[i] = exact_step(BranchKind::Homographic, 1.0, a, rng);
  }
  const KsResult ks = ks2(euler, exact);
  CHECK(ks.p > 0.005);
}

TEST_CASE("entrance_sample law and mass") {
  RngStream rng(5, 0);
  CHECK_THROWS_AS(entrance_sample(BranchKind::Homographic, 0.0, rng),
                  std::invalid_argument);

  const int n = 200000;
  MomentAccumulator hom_state, besq_state;
  for (int i = 0; i < n; ++i) {
    const EntranceDraw h = entrance_sample(BranchKind::Homographic, 0.1, rng);
    CHECK(h.mass == doctest::Approx(std::exp(0.1) / std::expm1(0.1)).epsilon(1e-14));
    hom_state.add(h.state);
    const EntranceDraw b = entrance_sample(BranchKind::Besq, 0.5, rng);
    CHECK(b.mass == 2.0);
    besq_state.add(b.state);
  }
  CHECK(std::abs(z_score(hom_state.estimate(), std::expm1(0.1))) <= 3.0);
  CHECK(std::abs(z_score(besq_state.estimate(), 0.5)) <= 3.0);
}

TEST_CASE("entrance rule is semigroup-consistent: nu_a P_b = nu_{a+b}") {
  // Mass-weighted Laplace transform of the positive part after an exact step
  // equals the entrance transform at the summed level.
  const double lambda = 1.0;
  const int n = 100000;
  RngStream rng(6, 0);
  for (const BranchKind kind : {BranchKind::Homographic, BranchKind::Besq}) {
    for (double a : {0.1, 0.5, 1.0}) {
      for (double b : {0.1, 0.5, 1.0}) {
        const JumpLaw target = levy_of(kind, a + b);
        const double analytic =
            target.rate / (1.0 + lambda * target.jump_mean);
        const double mass = levy_of(kind, a).rate;
        MomentAccumulator acc;
        for (int i = 0; i < n; ++i) {
          const EntranceDraw draw = entrance_sample(kind, a, rng);
          const double u = exact_step(kind, draw.state, b, rng);
          acc.add(u > 0.0 ? std::exp(-lambda * u) : 0.0);
        }
        Estimate est = acc.estimate();
        est.mean *= mass;
        est.std_error *= mass;
        CHECK(std::abs(z_score(est, analytic)) <= 3.5);
      }
    }
  }
}

TEST_CASE("extinction_weight values and Monte Carlo frequencies") {
  CHECK(extinction_weight(BranchKind::Homographic, 0.0) == 1.0);
  CHECK(extinction_weight(BranchKind::Besq, 0.0) == 1.0);
  CHECK(extinction_weight(BranchKind::Homographic, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(extinction_weight(BranchKind::Besq, 7.3) == 1.0);

  RngStream rng(7, 0);
  const int n = 200000;
  int hom_dead = 0, besq_dead = 0;
  const double horizon = 8.0;
  for (int i = 0; i < n; ++i) {
    hom_dead += exact_step(BranchKind::Homographic, 1.0, horizon, rng) == 0.0;
    besq_dead += exact_step(BranchKind::Besq, 1.0, horizon, rng) == 0.0;
  }
  // Finite-horizon absorption probabilities exp(-z*rate(A)); the homographic
  // one is already within 0.04% of the limit exp(-z).
  const double p_hom = std::exp(-levy_of(BranchKind::Homographic, horizon).rate);
  const double p_besq = std::exp(-levy_of(BranchKind::Besq, horizon).rate);
  CHECK(std::abs(static_cast<double>(hom_dead) / n - p_hom) <=
        3.0 * std::sqrt(p_hom * (1 - p_hom) / n));
  CHECK(std::abs(static_cast<double>(hom_dead) / n -
                 extinction_weight(BranchKind::Homographic, 1.0)) <=
        3.0 * std::sqrt(p_hom * (1 - p_hom) / n) + 2e-4);
  CHECK(std::abs(static_cast<double>(besq_dead) / n - p_besq) <=
        3.0 * std::sqrt(p_besq * (1 - p_besq) / n));
}

TEST_CASE("Chapman-Kolmogorov: split steps compose in law (KS)") {
  RngStream rng(8, 0);
  const int n = 100000;
  for (const BranchKind kind : {BranchKind::Homographic, BranchKind::Besq}) {
    std::vector<double> split(n), direct(n);
    for (int i = 0; i < n; ++i) {
      const double mid = exact_step(kind, 1.0, 0.4, rng);
      split[i] = mid > 0.0 ? exact_step(kind, mid, 0.6, rng) : 0.0;
      direct[i] = exact_step(kind, 1.0, 1.0, rng);
    }
    const KsResult ks = ks2(split, direct);
    CHECK(ks.p > 0.01);
  }
}

TEST_CASE("transition Laplace transforms match exp(-x f_a(lambda))") {
  RngStream rng(9, 0);
  const double x = 1.0;
  const int n = 100000;
  for (const BranchKind kind : {BranchKind::Homographic, BranchKind::Besq}) {
    for (double a : {0.3, 1.0}) {
      for (double lambda : {0.5, 1.0, 2.0}) {
        MomentAccumulator acc;
        for (int i = 0; i < n; ++i) {
          acc.add(std::exp(-lambda * exact_step(kind, x, a, rng)));
        }
        const double analytic =
            std::exp(-x * apply_exponent(mobius(kind, a), lambda));
        CHECK(std::abs(z_score(acc.estimate(), analytic)) <= 3.5);
      }
    }
  }
}

TEST_CASE("atom at zero: P(Z_a = 0 | Z_0 = x) = exp(-x rate(a))") {
  RngStream rng(10, 0);
  const int n = 200000;
  const double x = 0.7, a = 0.9;
  for (const BranchKind kind : {BranchKind::Homographic, BranchKind::Besq}) {
    int dead = 0;
    for (int i = 0; i < n; ++i) {
      dead += exact_step(kind, x, a, rng) == 0.0;
    }
    const double p = std::exp(-x * levy_of(kind, a).rate);
    CHECK(std::abs(static_cast<double>(dead) / n - p) <=
          3.0 * std::sqrt(p * (1 - p) / n));
  }
}
