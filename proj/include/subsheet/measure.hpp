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

#ifndef SUBSHEET_MEASURE_HPP
#define SUBSHEET_MEASURE_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace subsheet {

struct Atom {
  double location = 0.0;  // >= 0
  double weight = 0.0;    // > 0
};

// Closed interval [lo, hi] carrying a constant density >= 0.
struct DensityPiece {
  double lo = 0.0;
  double hi = 0.0;
  double density = 0.0;
};

// A finite positive measure on [0, inf) with compact support: a list of
// atoms plus a piecewise-constant density. Atoms are kept sorted by
// location; pieces are sorted and must not overlap.
class HalfLineMeasure {
 public:
  HalfLineMeasure() = default;

  HalfLineMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
      : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::sort(pieces_.begin(), pieces_.end(),
              [](const DensityPiece& a, const DensityPiece& b) { return a.lo < b.lo; });
    // Canonical form: one atom per location, weights merged.
    std::size_t w = 0;
    for (std::size_t r = 0; r < atoms_.size(); ++r) {
      if (w > 0 && atoms_[r].location == atoms_[w - 1].location) {
        atoms_[w - 1].weight += atoms_[r].weight;
      } else {
        atoms_[w++] = atoms_[r];
      }
    }
    atoms_.resize(w);
    for (const Atom& a : atoms_) {
      if (!(a.location >= 0.0)) throw std::invalid_argument("atom location < 0");
      if (!(a.weight > 0.0)) throw std::invalid_argument("atom weight <= 0");
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const DensityPiece& p = pieces_[i];
      if (!(p.lo >= 0.0) || !(p.hi > p.lo)) {
        throw std::invalid_argument("density piece needs 0 <= lo < hi");
      }
      if (!(p.density >= 0.0)) throw std::invalid_argument("density < 0");
      if (i > 0 && p.lo < pieces_[i - 1].hi) {
        throw std::invalid_argument("density pieces overlap");
      }
    }
  }

  static HalfLineMeasure from_atoms(std::vector<Atom> atoms) {
    return HalfLineMeasure(std::move(atoms), {});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

  bool empty() const { return atoms_.empty() && pieces_.empty(); }
  bool is_atomic() const { return pieces_.empty(); }

  double total_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.weight;
    for (const DensityPiece& p : pieces_) m += p.density * (p.hi - p.lo);
    return m;
  }

  // sup of the support; 0 for the zero measure.
  double support_max() const {
    double s = 0.0;
    if (!atoms_.empty()) s = std::max(s, atoms_.back().location);
    if (!pieces_.empty()) s = std::max(s, pieces_.back().hi);
    return s;
  }

  // inf of the support; 0 for the zero measure.
  double support_min() const {
    if (empty()) return 0.0;
    double s = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) s = std::min(s, atoms_.front().location);
    if (!pieces_.empty()) s = std::min(s, pieces_.front().lo);
    return s;
  }

  // Density value at x (atoms excluded); pieces are closed intervals.
  double density_at(double x) const {
    for (const DensityPiece& p : pieces_) {
      if (x >= p.lo && x <= p.hi) return p.density;
    }
    return 0.0;
  }

  // Measure restricted to locations <= x (atoms at x included).
  HalfLineMeasure restrict_below(double x) const {
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    for (const Atom& a : atoms_) {
      if (a.location <= x) atoms.push_back(a);
    }
    for (const DensityPiece& p : pieces_) {
      if (p.lo >= x) continue;
      pieces.push_back(DensityPiece{p.lo, std::min(p.hi, x), p.density});
    }
    return HalfLineMeasure(std::move(atoms), std::move(pieces));
  }

  // Measure restricted to locations > x.
  HalfLineMeasure restrict_above(double x) const {
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    for (const Atom& a : atoms_) {
      if (a.location > x) atoms.push_back(a);
    }
    for (const DensityPiece& p : pieces_) {
      if (p.hi <= x) continue;
      pieces.push_back(DensityPiece{std::max(p.lo, x), p.hi, p.density});
    }
    return HalfLineMeasure(std::move(atoms), std::move(pieces));
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

}  // namespace subsheet

#endif  // SUBSHEET_MEASURE_HPP
