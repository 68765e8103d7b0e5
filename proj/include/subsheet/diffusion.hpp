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

#ifndef SUBSHEET_DIFFUSION_HPP
#define SUBSHEET_DIFFUSION_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subsheet/branch.hpp"
#include "subsheet/rng.hpp"
#include "subsheet/subordinator.hpp"

namespace subsheet {

// One exact transition of the level diffusion: Z_{a+da} given Z_a = x is
// distributed as the parameter-da subordinator run for time x. The origin is
// absorbing and is hit with probability exp(-x * rate(da)).
inline double exact_step(BranchKind kind, double x, double da, RngStream& rng) {
  if (!(x >= 0.0)) throw std::invalid_argument("exact_step: x must be >= 0");
  if (!(da > 0.0)) throw std::invalid_argument("exact_step: da must be > 0");
  if (x == 0.0) return 0.0;
  return increment(levy_of(kind, da), x, rng);
}

// Full-truncation Euler-Maruyama step for dZ = sqrt(2Z) dB + theta * Z da.
// Only used to exhibit the SDE form; exact_step is the default everywhere.
inline double euler_step(BranchKind kind, double x, double da, RngStream& rng) {
  if (!(x >= 0.0)) throw std::invalid_argument("euler_step: x must be >= 0");
  if (!(da >= 0.0)) throw std::invalid_argument("euler_step: da must be >= 0");
  const double xp = std::max(x, 0.0);
  const double next = x + std::sqrt(2.0 * xp * da) * rng.normal() +
                      drift_theta(kind) * x * da;
  return std::max(next, 0.0);
}

// A start drawn from the entrance rule at level epsilon: the state is
// exponential with the branch jump mean, and `mass` is the total mass of the
// entrance measure there. Evolving the state with exact_step and weighting
// by mass realizes the sigma-finite path measure restricted to paths alive
// at epsilon.
struct EntranceDraw {
  double epsilon = 0.0;
  double state = 0.0;
  double mass = 0.0;
};

inline EntranceDraw entrance_sample(BranchKind kind, double epsilon,
                                    RngStream& rng) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("entrance_sample: epsilon must be > 0");
  }
  const JumpLaw law = levy_of(kind, epsilon);
  return EntranceDraw{epsilon, rng.exponential(law.jump_mean), law.rate};
}

// Probability of eventual absorption at 0 from state z: exp(-z) on the
// homographic branch (the jump rate tends to 1 as the level grows), 1 on the
// Besq branch (the rate tends to 0).
inline double extinction_weight(BranchKind kind, double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("extinction_weight: z must be >= 0");
  if (kind == BranchKind::Besq) return 1.0;
  return std::exp(-z);
}

}  // namespace subsheet

#endif  // SUBSHEET_DIFFUSION_HPP
