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

#ifndef SUBSHEET_SPECTRAL_HPP
#define SUBSHEET_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subsheet/measure.hpp"

namespace subsheet {

// Right-boundary condition for the solve of g'' = g (theta^2/4 + lambda mu).
// Plain selects the solution growing like e^{+theta x/2} beyond supp mu, so
// the Riccati profile xi vanishes there and Phi is the Laplace exponent of
// <Y_t, mu>. Extinction selects the decreasing solution e^{-theta x/2}
// (xi = theta beyond supp mu), which produces the extinction-weighted
// functional instead. The two coincide when theta = 0.
enum class BoundaryVariant { Plain, Extinction };

inline double boundary_xi(BoundaryVariant variant, double theta) {
  return variant == BoundaryVariant::Extinction ? theta : 0.0;
}

// (g, g') state of the second-order solve.
struct OdeState {
  double g = 1.0;
  double gp = 0.0;
};

// Exact backward propagator over a piece of constant coefficient
// kappa^2 = theta^2/4 + lambda * density: carries (g, g') at the right end
// of the piece to the left end. Entries are cosh/sinh of kappa*L with the
// odd entries negated, the L -> -L image of the forward flow; kappa = 0
// degenerates to the shear (g - L g', g').
inline OdeState propagate_piece(const OdeState& state, double length,
                                double kappa) {
  if (!(length >= 0.0)) throw std::invalid_argument("propagate_piece: length < 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("propagate_piece: kappa < 0");
  if (length == 0.0) return state;
  if (kappa == 0.0) {
    return OdeState{state.g - length * state.gp, state.gp};
  }
  const double ch = std::cosh(kappa * length);
  const double sh = std::sinh(kappa * length);
  return OdeState{ch * state.g - (sh / kappa) * state.gp,
                  -kappa * sh * state.g + ch * state.gp};
}

namespace detail {

// Backward propagation with per-chunk renormalization so cosh never
// overflows on long supports. The returned state is the true one up to a
// positive scalar; only the ratio g'/g is consumed downstream.
inline OdeState propagate_normalized(OdeState state, double length,
                                     double kappa) {
  constexpr double kMaxArgPerChunk = 30.0;
  double remaining = length;
  while (remaining > 0.0) {
    const double step =
        kappa > 0.0 ? std::min(remaining, kMaxArgPerChunk / kappa) : remaining;
    state = propagate_piece(state, step, kappa);
    const double scale = std::abs(state.g);
    if (!(scale > 0.0)) {
      throw std::runtime_error("spectral solve: g vanished during propagation");
    }
    state.g /= scale;
    state.gp /= scale;
    remaining -= step;
  }
  return state;
}

}  // namespace detail

// One constant-coefficient segment [x_left, x_right) of the solve, anchored
// by the normalized state at x_right^- (any atom at x_right already folded
// in), so xi can be evaluated anywhere inside by backward propagation.
struct SpectralSegment {
  double x_left = 0.0;
  double x_right = 0.0;
  double kappa = 0.0;
  OdeState right_state;
};

struct SpectralSolution {
  double theta = 0.0;
  double lambda = 0.0;
  BoundaryVariant variant = BoundaryVariant::Plain;
  double phi = 0.0;      // Phi(lambda) = xi(0, lambda)
  double x_max = 0.0;    // sup supp mu
  double xi_infinity = 0.0;
  std::vector<SpectralSegment> segments;  // ascending in x
};

// Solves g'' = g (theta^2/4 + lambda mu) backward from sup supp mu with the
// Dirichlet-to-Neumann data of the chosen variant: (g, g') = (1, theta/2 -
// xi_inf) there. Atoms enter as backward derivative jumps g' <- g' -
// lambda*w*g; their forward image g'(b+) - g'(b-) = lambda*w*g(b) is the
// distributional meaning of g * lambda*mu. Returns Phi = theta/2 -
// g'(0)/g(0) together with the segment anchors needed to evaluate xi.
inline SpectralSolution riccati_solve(double theta, const HalfLineMeasure& mu,
                                      double lambda, BoundaryVariant variant) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("riccati_solve: lambda must be >= 0");
  }
  if (!(theta >= 0.0)) {
    throw std::invalid_argument("riccati_solve: theta must be >= 0");
  }

  SpectralSolution sol;
  sol.theta = theta;
  sol.lambda = lambda;
  sol.variant = variant;
  sol.xi_infinity = boundary_xi(variant, theta);
  sol.x_max = mu.support_max();

  // Partition [0, x_max] into constant-density cells whose boundaries are
  // the atom locations and piece endpoints.
  std::vector<double> cuts{0.0, sol.x_max};
  for (const Atom& a : mu.atoms()) {
    if (a.location < sol.x_max) cuts.push_back(a.location);
  }
  for (const DensityPiece& p : mu.pieces()) {
    cuts.push_back(p.lo);
    if (p.hi < sol.x_max) cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
             cuts.end());

  OdeState state{1.0, theta / 2.0 - sol.xi_infinity};

  auto apply_atoms_at = [&](double x) {
    for (const Atom& a : mu.atoms()) {
      if (std::abs(a.location - x) <= 1e-15 * std::max(1.0, x)) {
        state.gp -= lambda * a.weight * state.g;
      }
    }
  };

  apply_atoms_at(sol.x_max);
  for (std::size_t k = cuts.size(); k-- > 1;) {
    const double x_left = cuts[k - 1];
    const double x_right = cuts[k];
    const double density = mu.density_at(0.5 * (x_left + x_right));
    const double kappa = std::sqrt(theta * theta / 4.0 + lambda * density);
    sol.segments.push_back(SpectralSegment{x_left, x_right, kappa, state});
    state = detail::propagate_normalized(state, x_right - x_left, kappa);
    apply_atoms_at(x_left);
  }
  std::reverse(sol.segments.begin(), sol.segments.end());

  if (!(state.g > 0.0)) {
    throw std::runtime_error("spectral solve: nonpositive g at the origin");
  }
  sol.phi = theta / 2.0 - state.gp / state.g;
  return sol;
}

// xi(x, lambda) = theta/2 - g'(x)/g(x). Right-continuous at atoms, equal to
// the variant's boundary value beyond supp mu, and xi(0) = Phi.
inline double xi_profile(const SpectralSolution& sol, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("xi_profile: x must be >= 0");
  if (x >= sol.x_max) return sol.xi_infinity;
  if (x == 0.0) return sol.phi;
  auto it = std::upper_bound(
      sol.segments.begin(), sol.segments.end(), x,
      [](double v, const SpectralSegment& s) { return v < s.x_right; });
  const SpectralSegment& seg = *it;
  const OdeState s =
      detail::propagate_normalized(seg.right_state, seg.x_right - x, seg.kappa);
  return sol.theta / 2.0 - s.gp / s.g;
}

}  // namespace subsheet

#endif  // SUBSHEET_SPECTRAL_HPP
