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

#ifndef SUBSHEET_SUBORDINATOR_HPP
#define SUBSHEET_SUBORDINATOR_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "subsheet/branch.hpp"
#include "subsheet/rng.hpp"

namespace subsheet {

// A subordinator path observed on a grid: nondecreasing times, nondecreasing
// values, equal adjacent times carry equal values. Jump times between grid
// points are never exposed.
struct PathOnGrid {
  std::vector<double> times;
  std::vector<double> values;
};

// One increment of the compound-Poisson subordinator over an interval of
// length dt: c * Gamma(N, 1) with N ~ Poisson(rate * dt). Exactly 0 when no
// jump arrives, so the law keeps its atom at the origin.
inline double increment(const JumpLaw& law, double dt, RngStream& rng) {
  if (!(dt >= 0.0)) throw std::invalid_argument("increment: dt must be >= 0");
  if (dt == 0.0) return 0.0;
  const std::uint64_t n = rng.poisson(law.rate * dt);
  if (n == 0) return 0.0;
  return law.jump_mean * rng.gamma_integer_shape(n);
}

// Evaluates one fresh subordinator path at the given nondecreasing times by
// cumulating independent increments over consecutive intervals. The implicit
// value at time 0 is 0.
inline PathOnGrid path_on_grid(const JumpLaw& law, std::span<const double> times,
                               RngStream& rng) {
  PathOnGrid path;
  path.times.assign(times.begin(), times.end());
  path.values.resize(times.size());
  double prev_time = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= prev_time)) {
      throw std::invalid_argument("path_on_grid: times must be nondecreasing and >= 0");
    }
    value += increment(law, times[i] - prev_time, rng);
    path.values[i] = value;
    prev_time = times[i];
  }
  return path;
}

}  // namespace subsheet

#endif  // SUBSHEET_SUBORDINATOR_HPP
