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

#ifndef SUBSHEET_SHEET_HPP
#define SUBSHEET_SHEET_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subsheet/branch.hpp"
#include "subsheet/measure.hpp"
#include "subsheet/rng.hpp"
#include "subsheet/subordinator.hpp"

namespace subsheet {

// The two-parameter process Y_{a,t} sampled on an (a-levels x t-grid)
// lattice. Row 0 is the t-grid itself (Y_{0,t} = t); row i is a fresh
// independent subordinator of parameter a_i - a_{i-1} evaluated at the times
// of row i-1, so every row is nondecreasing in t by construction and each
// column is the level diffusion started at t_j.
struct SheetSample {
  BranchKind branch = BranchKind::Homographic;
  std::vector<double> a_levels;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> values;  // values[i][j] = Y_{a_i, t_j}
  std::uint64_t master_seed = 0;

  double at(std::size_t level, std::size_t time) const {
    return values[level][time];
  }
  std::size_t levels() const { return a_levels.size(); }
  std::size_t times() const { return t_grid.size(); }

  // Index of an a-level, matched within absolute/relative 1e-12.
  std::size_t level_index(double a) const {
    for (std::size_t i = 0; i < a_levels.size(); ++i) {
      if (std::abs(a_levels[i] - a) <= 1e-12 * std::max(1.0, std::abs(a))) {
        return i;
      }
    }
    throw std::invalid_argument(
        "level " + std::to_string(a) +
        " is not on the a-lattice; add it to a_levels before pairing");
  }
};

namespace detail {

inline void check_sheet_grids(std::span<const double> a_levels,
                              std::span<const double> t_grid) {
  if (a_levels.empty() || a_levels.front() != 0.0) {
    throw std::invalid_argument("a_levels must start at 0");
  }
  for (std::size_t i = 1; i < a_levels.size(); ++i) {
    if (!(a_levels[i] > a_levels[i - 1])) {
      throw std::invalid_argument("a_levels must be strictly increasing");
    }
  }
  if (t_grid.empty() || !(t_grid.front() >= 0.0)) {
    throw std::invalid_argument("t_grid must be nonempty with entries >= 0");
  }
  for (std::size_t j = 1; j < t_grid.size(); ++j) {
    if (!(t_grid[j] > t_grid[j - 1])) {
      throw std::invalid_argument("t_grid must be strictly increasing");
    }
  }
}

}  // namespace detail

// Samples the sheet by the nested-composition law: one subordinator path per
// level, evaluated at the previous row. Ties in the previous row produce
// zero increments, which keeps coupled columns consistent.
inline SheetSample sample_sheet(BranchKind branch,
                                std::span<const double> a_levels,
                                std::span<const double> t_grid,
                                RngStream& rng) {
  detail::check_sheet_grids(a_levels, t_grid);
  SheetSample sheet;
  sheet.branch = branch;
  sheet.a_levels.assign(a_levels.begin(), a_levels.end());
  sheet.t_grid.assign(t_grid.begin(), t_grid.end());
  sheet.master_seed = rng.master_seed();
  sheet.values.resize(a_levels.size());
  sheet.values[0] = sheet.t_grid;
  for (std::size_t i = 1; i < a_levels.size(); ++i) {
    const JumpLaw law = levy_of(branch, a_levels[i] - a_levels[i - 1]);
    sheet.values[i] = path_on_grid(law, sheet.values[i - 1], rng).values;
  }
  return sheet;
}

// <Y_t, mu> for every t on the grid. Atom contributions are summed exactly
// (atom locations must be lattice levels); density pieces are integrated by
// the trapezoid rule on the lattice points inside each piece, which carries
// an O(h) bias in the lattice step.
inline std::vector<double> pair_against(const SheetSample& sheet,
                                        const HalfLineMeasure& mu) {
  const double a_min = sheet.a_levels.front();
  const double a_max = sheet.a_levels.back();
  for (const DensityPiece& p : mu.pieces()) {
    if (p.lo < a_min || p.hi > a_max) {
      throw std::invalid_argument("density piece exceeds the a-lattice hull");
    }
  }
  std::vector<std::size_t> atom_rows;
  atom_rows.reserve(mu.atoms().size());
  for (const Atom& atom : mu.atoms()) {
    atom_rows.push_back(sheet.level_index(atom.location));
  }

  std::vector<double> out(sheet.times(), 0.0);
  for (std::size_t j = 0; j < sheet.times(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < atom_rows.size(); ++k) {
      s += mu.atoms()[k].weight * sheet.values[atom_rows[k]][j];
    }
    for (const DensityPiece& p : mu.pieces()) {
      double prev_a = 0.0, prev_y = 0.0;
      bool have_prev = false;
      for (std::size_t i = 0; i < sheet.levels(); ++i) {
        const double a = sheet.a_levels[i];
        if (a < p.lo || a > p.hi) continue;
        if (have_prev) {
          s += p.density * 0.5 * (sheet.values[i][j] + prev_y) * (a - prev_a);
        }
        prev_a = a;
        prev_y = sheet.values[i][j];
        have_prev = true;
      }
    }
    out[j] = s;
  }
  return out;
}

// Samples <Y_t, mu> by the split-point decomposition: the sheet is run up to
// level split_x, then an independent sheet started from "time" Y_{split_x,t}
// carries the part of mu above split_x. Atomic mu only; equal in law to
// direct pairing.
inline double two_stage_pairing(BranchKind branch, const HalfLineMeasure& mu,
                                double split_x, double t, RngStream& rng) {
  if (!mu.is_atomic()) {
    throw std::invalid_argument(
        "two_stage_pairing: mu must be atomic; density pieces are not supported");
  }
  if (mu.empty()) return 0.0;
  // A split below (above) the whole support degenerates to mu_1 = 0
  // (mu_2 = 0); both are legitimate.
  if (!(split_x >= 0.0)) {
    throw std::invalid_argument("two_stage_pairing: split_x must be >= 0");
  }

  std::vector<double> lower_levels{0.0};
  std::vector<double> upper_levels{0.0};
  for (const Atom& atom : mu.atoms()) {
    if (atom.location <= split_x) {
      if (atom.location > 0.0) lower_levels.push_back(atom.location);
    } else {
      upper_levels.push_back(atom.location - split_x);
    }
  }
  if (lower_levels.back() != split_x) lower_levels.push_back(split_x);

  const std::vector<double> t_grid{t};
  const SheetSample lower = sample_sheet(branch, lower_levels, t_grid, rng);
  double paired = 0.0;
  for (const Atom& atom : mu.atoms()) {
    if (atom.location <= split_x) {
      paired += atom.weight * lower.values[lower.level_index(atom.location)][0];
    }
  }

  if (upper_levels.size() > 1) {
    const double restart = lower.values[lower.level_index(split_x)][0];
    const std::vector<double> restart_grid{restart};
    const SheetSample upper = sample_sheet(branch, upper_levels, restart_grid, rng);
    for (const Atom& atom : mu.atoms()) {
      if (atom.location > split_x) {
        paired += atom.weight *
                  upper.values[upper.level_index(atom.location - split_x)][0];
      }
    }
  }
  return paired;
}

// Realizes B_{Y_{a_i,t_j}} for one standard Brownian path B: all sheet
// values are sorted into one multiset, B is sampled sequentially along it,
// and the draws are routed back to their lattice slots. Tied values share
// one Brownian value, so the whole lattice lives on a single path.
inline std::vector<std::vector<double>> subordinate_brownian(
    const SheetSample& sheet, RngStream& rng) {
  const std::size_t rows = sheet.levels();
  const std::size_t cols = sheet.times();
  std::vector<std::pair<double, std::size_t>> flat;
  flat.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      flat.emplace_back(sheet.values[i][j], i * cols + j);
    }
  }
  std::sort(flat.begin(), flat.end());

  std::vector<std::vector<double>> out(rows, std::vector<double>(cols, 0.0));
  double prev_time = 0.0;
  double b = 0.0;
  for (const auto& [time, slot] : flat) {
    if (time > prev_time) {
      b += std::sqrt(time - prev_time) * rng.normal();
      prev_time = time;
    }
    out[slot / cols][slot % cols] = b;
  }
  return out;
}

}  // namespace subsheet

#endif  // SUBSHEET_SHEET_HPP
