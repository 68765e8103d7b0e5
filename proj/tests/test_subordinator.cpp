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

#include "subsheet/stats.hpp"
#include "subsheet/subordinator.hpp"

using namespace subsheet;

TEST_CASE("increment preconditions and the dt = 0 atom") {
  RngStream rng(1, 0);
  const JumpLaw law{2.0, 1.0};
  CHECK(increment(law, 0.0, rng) == 0.0);
  CHECK_THROWS_AS(increment(law, -0.5, rng), std::invalid_argument);
}

TEST_CASE("increment mean and zero-atom frequency (rate 2, c 1, dt 1)") {
  RngStream rng(2, 0);
  const JumpLaw law{2.0, 1.0};
  const int n = 400000;
  MomentAccumulator acc;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    const double v = increment(law, 1.0, rng);
    REQUIRE(v >= 0.0);
    acc.add(v);
    zeros += v == 0.0;
  }
  // Compound-Poisson mean = rate*c*dt = 2.
  CHECK(std::abs(z_score(acc.estimate(), 2.0)) <= 3.0);
  // P(no jump) = exp(-rate*dt).
  const double p0 = std::exp(-2.0);
  const double se0 = std::sqrt(p0 * (1.0 - p0) / n);
  CHECK(std::abs(static_cast<double>(zeros) / n - p0) <= 3.0 * se0);
}

TEST_CASE("path_on_grid basics") {
  const JumpLaw law{2.0, 1.0};

  RngStream rng(3, 0);
  const std::vector<double> tied{1.0, 1.0};
  const PathOnGrid p1 = path_on_grid(law, tied, rng);
  CHECK(p1.values[0] == p1.values[1]);

  const std::vector<double> with_zero{0.0, 1.0};
  const PathOnGrid p2 = path_on_grid(law, with_zero, rng);
  CHECK(p2.values[0] == 0.0);

  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(path_on_grid(law, unsorted, rng), std::invalid_argument);
  const std::vector<double> negative{-1.0, 0.5};
  CHECK_THROWS_AS(path_on_grid(law, negative, rng), std::invalid_argument);
}

TEST_CASE("marginal Laplace transform at the homographic fixed point") {
  // law (rate 2, c 1) is levy_of(Homographic, ln 2); f(1) = 1, so
  // E exp(-Y_1) = exp(-1) when read at t = 1.0 on the grid {0.5, 1.0}.
  RngStream rng(4, 0);
  const JumpLaw law{2.0, 1.0};
  const std::vector<double> times{0.5, 1.0};
  const int n = 400000;
  MomentAccumulator acc;
  for (int i = 0; i < n; ++i) {
    const PathOnGrid p = path_on_grid(law, times, rng);
    REQUIRE(p.values[1] >= p.values[0]);
    acc.add(std::exp(-p.values[1]));
  }
  CHECK(std::abs(z_score(acc.estimate(), std::exp(-1.0))) <= 3.0);
}

TEST_CASE("paths are monotone on random grids") {
  RngStream rng(5, 0);
  const JumpLaw law{3.0, 0.7};
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> times(20);
    double t = 0.0;
    for (double& v : times) {
      t += rng.uniform() < 0.2 ? 0.0 : 0.3 * rng.uniform();
      v = t;
    }
    const PathOnGrid p = path_on_grid(law, times, rng);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
      REQUIRE(p.values[i] >= p.values[i - 1]);
      if (times[i] == times[i - 1]) REQUIRE(p.values[i] == p.values[i - 1]);
    }
  }
}

TEST_CASE("increments are stationary (two-sample KS)") {
  RngStream rng(6, 0);
  const JumpLaw law{2.0, 1.0};
  const int n = 100000;
  const double s = 0.4;
  std::vector<double> early(n), late(n);
  const std::vector<double> times{0.3, 0.3 + s, 2.0, 2.0 + s};
  for (int i = 0; i < n; ++i) {
    const PathOnGrid p = path_on_grid(law, times, rng);
    early[i] = p.values[1] - p.values[0];
    late[i] = p.values[3] - p.values[2];
  }
  const KsResult ks = ks2(early, late);
  CHECK(ks.p > 0.01);
}

TEST_CASE("jump counts follow the Poisson law (chi-square)") {
  // The marginal is c * Gamma(N, 1) with N ~ Poisson(rate * t); the counts
  // are drawn through the same sampler the increments use.
  RngStream rng(7, 0);
  const double mean = 2.0 * 1.0;
  const int n = 100000;
  std::vector<int> counts(30, 0);
  for (int i = 0; i < n; ++i) {
    counts[std::min<std::uint64_t>(rng.poisson(mean), counts.size() - 1)]++;
  }
  double pmf = std::exp(-mean);
  double stat = 0.0;
  double tail = static_cast<double>(n);
  std::size_t bins = 0;
  for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
    const double expected = n * pmf;
    if (tail - expected < 5.0) break;
    stat += (counts[k] - expected) * (counts[k] - expected) / expected;
    tail -= expected;
    ++bins;
    pmf *= mean / static_cast<double>(k + 1);
  }
  int tail_count = n;
  for (std::size_t k = 0; k < bins; ++k) tail_count -= counts[k];
  stat += (tail_count - tail) * (tail_count - tail) / tail;
  CHECK(chi_square_tail(stat, static_cast<double>(bins)) > 0.01);
}
