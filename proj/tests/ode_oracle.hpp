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

#ifndef SUBSHEET_TESTS_ODE_ORACLE_HPP
#define SUBSHEET_TESTS_ODE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "subsheet/measure.hpp"
#include "subsheet/spectral.hpp"

namespace subsheet_tests {

// Independent oracle for the spectral solver: fixed-step RK4 integration of
// the linear system (g, g')' = (g', kappa^2(x) g), run backward from
// sup supp mu with steps snapped to density breakpoints; atoms are applied
// as derivative jumps. Shares no code with the transfer-matrix path.
inline double rk4_phi(double theta, const subsheet::HalfLineMeasure& mu,
                      double lambda, subsheet::BoundaryVariant variant,
                      double step) {
  const double x_max = mu.support_max();
  double g = 1.0;
  double gp = theta / 2.0 - subsheet::boundary_xi(variant, theta);

  auto apply_atoms = [&](double x) {
    for (const subsheet::Atom& a : mu.atoms()) {
      if (std::abs(a.location - x) <= 1e-12) gp -= lambda * a.weight * g;
    }
  };
  std::vector<double> cuts{0.0, x_max};
  for (const subsheet::Atom& a : mu.atoms()) cuts.push_back(a.location);
  for (const subsheet::DensityPiece& p : mu.pieces()) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  apply_atoms(x_max);
  for (std::size_t c = cuts.size(); c-- > 1;) {
    const double lo = cuts[c - 1];
    const double hi = cuts[c];
    if (hi > x_max) continue;
    const double q =
        theta * theta / 4.0 + lambda * mu.density_at(0.5 * (lo + hi));
    const auto n_steps = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    const double h = -(hi - lo) / static_cast<double>(n_steps);
    for (std::size_t s = 0; s < n_steps; ++s) {
      const double k1g = gp, k1p = q * g;
      const double k2g = gp + 0.5 * h * k1p, k2p = q * (g + 0.5 * h * k1g);
      const double k3g = gp + 0.5 * h * k2p, k3p = q * (g + 0.5 * h * k2g);
      const double k4g = gp + h * k3p, k4p = q * (g + h * k3g);
      g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
      gp += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      if (std::abs(g) > 1e100) {
        gp /= std::abs(g);
        g /= std::abs(g);
      }
    }
    apply_atoms(lo);
  }
  return theta / 2.0 - gp / g;
}

}  // namespace subsheet_tests

#endif  // SUBSHEET_TESTS_ODE_ORACLE_HPP
