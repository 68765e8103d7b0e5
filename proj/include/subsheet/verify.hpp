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

#ifndef SUBSHEET_VERIFY_HPP
#define SUBSHEET_VERIFY_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subsheet/branch.hpp"
#include "subsheet/diffusion.hpp"
#include "subsheet/measure.hpp"
#include "subsheet/parallel.hpp"
#include "subsheet/sheet.hpp"
#include "subsheet/spectral.hpp"
#include "subsheet/stats.hpp"
#include "subsheet/subordinator.hpp"

namespace subsheet {

// One analytic-vs-estimate comparison inside a report. Two kinds exist:
// "z" items pass when |z| <= gate; "ks" items store the p-value in
// estimate.mean and the D statistic in z, and pass when the p-value exceeds
// the gate.
struct CheckItem {
  std::string label;
  std::string kind = "z";
  double analytic = 0.0;
  Estimate estimate;
  double z = 0.0;
  double gate = 3.0;
  bool pass = false;
};

// Outcome of one verification: every field needed to recompute the pass
// flag is stored, and (seed, parameters) reproduce the numbers bit-exactly.
struct CheckReport {
  std::string name;
  std::vector<CheckItem> items;
  bool pass = true;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void push_item(CheckReport& report, std::string label, double analytic,
                      const Estimate& est, double gate = 3.0) {
  CheckItem item;
  item.label = std::move(label);
  item.analytic = analytic;
  item.estimate = est;
  item.gate = gate;
  item.z = z_score(est, analytic);
  item.pass = std::abs(item.z) <= gate;
  report.items.push_back(std::move(item));
  report.pass = report.pass && report.items.back().pass;
}

// z-score for the difference of two independent estimates.
inline double z_between(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  if (se == 0.0) return a.mean == b.mean ? 0.0 : std::numeric_limits<double>::infinity();
  return (a.mean - b.mean) / se;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

// Gap laws for a strictly increasing level vector starting at 0.
inline std::vector<JumpLaw> gap_laws(BranchKind branch,
                                     std::span<const double> levels) {
  std::vector<JumpLaw> laws;
  laws.reserve(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    laws.push_back(levy_of(branch, levels[i] - levels[i - 1]));
  }
  return laws;
}

// One sheet column: Y at every level of the lattice for a single time t.
// out[0] = t; out[i] is one increment-composition step from out[i-1].
inline void level_chain(std::span<const JumpLaw> laws, double t,
                        RngStream& rng, std::span<double> out) {
  out[0] = t;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    out[i + 1] = out[i] > 0.0 ? increment(laws[i], out[i], rng) : 0.0;
  }
}

// Sorted unique union of {0}, atom locations of mu, and extra levels.
inline std::vector<double> lattice_for(const HalfLineMeasure& mu,
                                       std::span<const double> extra = {}) {
  std::vector<double> levels{0.0};
  for (const Atom& a : mu.atoms()) levels.push_back(a.location);
  levels.insert(levels.end(), extra.begin(), extra.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

// Chunked mean of a per-replicate functional, merged in chunk order.
template <typename Fn>
Estimate chunked_mean(std::size_t n, const McOptions& opt, Fn&& replicate) {
  const std::size_t chunk_size = opt.chunk_size > 0 ? opt.chunk_size : n;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<MomentAccumulator> partial(chunks);
  for_each_chunk(n, opt,
                 [&](std::size_t c, std::size_t begin, std::size_t end,
                     RngStream& rng) {
                   MomentAccumulator acc;
                   for (std::size_t r = begin; r < end; ++r) {
                     acc.add(replicate(rng));
                   }
                   partial[c] = acc;
                 });
  MomentAccumulator total;
  for (const MomentAccumulator& acc : partial) total.merge(acc);
  return total.estimate();
}

// Chunked multi-output mean: replicate fills a row of width m.
template <typename Fn>
std::vector<Estimate> chunked_mean_rows(std::size_t n, std::size_t m,
                                        const McOptions& opt, Fn&& replicate) {
  const std::size_t chunk_size = opt.chunk_size > 0 ? opt.chunk_size : n;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<std::vector<MomentAccumulator>> partial(
      chunks, std::vector<MomentAccumulator>(m));
  for_each_chunk(n, opt,
                 [&](std::size_t c, std::size_t begin, std::size_t end,
                     RngStream& rng) {
                   std::vector<double> row(m);
                   for (std::size_t r = begin; r < end; ++r) {
                     replicate(rng, row);
                     for (std::size_t k = 0; k < m; ++k) {
                       partial[c][k].add(row[k]);
                     }
                   }
                 });
  std::vector<Estimate> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    MomentAccumulator total;
    for (std::size_t c = 0; c < chunks; ++c) total.merge(partial[c][k]);
    out.push_back(total.estimate());
  }
  return out;
}

}  // namespace detail

// Confronts the Monte Carlo Laplace functional of <Y_t, mu> with the
// spectral exponent. Plain: E exp(-lambda <Y_t,mu>) vs exp(-t Phi_plain).
// Extinction: the estimator is additionally weighted by the extinction
// probability from Y_{A,t} at the horizon A = sup supp mu (Rao-Blackwellized
// extinction indicator) and compared against exp(-t Phi_ext).
inline CheckReport check_laplace(BranchKind branch, const HalfLineMeasure& mu,
                                 double lambda, double t, std::size_t n,
                                 BoundaryVariant variant,
                                 const McOptions& opt) {
  if (!mu.is_atomic()) {
    throw std::invalid_argument("check_laplace: mu must be atomic");
  }
  detail::Stopwatch watch;
  CheckReport report;
  report.name = std::string("laplace-") + branch_name(branch) + "-" +
                (variant == BoundaryVariant::Plain ? "plain" : "extinction");
  report.seed = opt.master_seed;

  const double theta = drift_theta(branch);
  const SpectralSolution sol = riccati_solve(theta, mu, lambda, variant);
  const double analytic = std::exp(-t * sol.phi);

  const std::vector<double> levels = detail::lattice_for(mu);
  const std::vector<JumpLaw> laws = detail::gap_laws(branch, levels);
  std::vector<std::size_t> atom_rows;
  for (const Atom& a : mu.atoms()) {
    atom_rows.push_back(static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), a.location) -
        levels.begin()));
  }
  const bool weighted = variant == BoundaryVariant::Extinction;

  const Estimate est = detail::chunked_mean(
      n, opt, [&](RngStream& rng) {
        thread_local std::vector<double> chain;
        chain.resize(levels.size());
        detail::level_chain(laws, t, rng, chain);
        double paired = 0.0;
        for (std::size_t k = 0; k < atom_rows.size(); ++k) {
          paired += mu.atoms()[k].weight * chain[atom_rows[k]];
        }
        double v = std::exp(-lambda * paired);
        if (weighted) v *= extinction_weight(branch, chain.back());
        return v;
      });

  detail::push_item(report, "E[exp(-lambda<Y,mu>)] vs exp(-t*Phi)", analytic,
                    est);
  report.runtime_seconds = watch.seconds();
  return report;
}

// Verifies the path-space Levy-measure identity: for each entrance level
// epsilon below supp mu, I(eps) = mass(nu_eps) * E[exp(-<Z,mu>) - 1] with Z
// started from the entrance draw and stepped exactly through the atom
// locations. Every I(eps) must equal -Phi_plain(1) (lambda folded into the
// atom weights), the I(eps) must agree pairwise, and exp(t*I(eps)) must
// match the direct sheet estimate of E exp(-<Y_t,mu>).
inline CheckReport check_eq3(BranchKind branch, const HalfLineMeasure& mu,
                             std::span<const double> epsilons, double t,
                             std::size_t n, const McOptions& opt) {
  if (!mu.is_atomic()) {
    throw std::invalid_argument("check_eq3: mu must be atomic");
  }
  detail::Stopwatch watch;
  CheckReport report;
  report.name = std::string("eq3-") + branch_name(branch);
  report.seed = opt.master_seed;

  const double theta = drift_theta(branch);
  const SpectralSolution sol =
      riccati_solve(theta, mu, 1.0, BoundaryVariant::Plain);
  const double target = -sol.phi;

  if (mu.empty()) {
    // I(eps) = 0 exactly: nothing stochastic remains.
    Estimate zero{0.0, 0.0, 2};
    for (double eps : epsilons) {
      detail::push_item(report,
                        "I(eps=" + std::to_string(eps) + ") vs -Phi(1)", target,
                        zero);
    }
    report.runtime_seconds = watch.seconds();
    return report;
  }
  for (double eps : epsilons) {
    if (!(eps > 0.0) || !(eps < mu.support_min())) {
      throw std::invalid_argument(
          "check_eq3: every epsilon must satisfy 0 < eps < inf supp mu");
    }
  }

  // Entrance-law estimates of I(eps), one stream family per epsilon.
  std::vector<Estimate> entrance_estimates;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const double eps = epsilons[e];
    const JumpLaw entrance_law = levy_of(branch, eps);
    std::vector<double> hops{eps};
    for (const Atom& a : mu.atoms()) hops.push_back(a.location);
    std::vector<JumpLaw> hop_laws;
    for (std::size_t i = 1; i < hops.size(); ++i) {
      hop_laws.push_back(levy_of(branch, hops[i] - hops[i - 1]));
    }
    McOptions sub = opt;
    sub.check_id = opt.check_id + static_cast<std::uint32_t>(e) + 1;
    Estimate est = detail::chunked_mean(n, sub, [&](RngStream& rng) {
      double z = rng.exponential(entrance_law.jump_mean);
      double inner = 0.0;
      for (std::size_t k = 0; k < hop_laws.size(); ++k) {
        z = z > 0.0 ? increment(hop_laws[k], z, rng) : 0.0;
        inner += mu.atoms()[k].weight * z;
      }
      return std::expm1(-inner);
    });
    est.mean *= entrance_law.rate;
    est.std_error *= entrance_law.rate;
    entrance_estimates.push_back(est);
    detail::push_item(report, "I(eps=" + std::to_string(eps) + ") vs -Phi(1)",
                      target, est);
  }

  // Pairwise epsilon-invariance.
  for (std::size_t i = 0; i + 1 < entrance_estimates.size(); ++i) {
    for (std::size_t j = i + 1; j < entrance_estimates.size(); ++j) {
      CheckItem item;
      item.label = "I(eps=" + std::to_string(epsilons[i]) + ") vs I(eps=" +
                   std::to_string(epsilons[j]) + ")";
      item.analytic = 0.0;
      item.estimate =
          Estimate{entrance_estimates[i].mean - entrance_estimates[j].mean,
                   std::hypot(entrance_estimates[i].std_error,
                              entrance_estimates[j].std_error),
                   entrance_estimates[i].n};
      item.z = detail::z_between(entrance_estimates[i], entrance_estimates[j]);
      item.pass = std::abs(item.z) <= item.gate;
      report.items.push_back(item);
      report.pass = report.pass && item.pass;
    }
  }

  // Direct sheet estimate of E exp(-<Y_t,mu>) against exp(t * I(eps)).
  const std::vector<double> levels = detail::lattice_for(mu);
  const std::vector<JumpLaw> laws = detail::gap_laws(branch, levels);
  std::vector<std::size_t> atom_rows;
  for (const Atom& a : mu.atoms()) {
    atom_rows.push_back(static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), a.location) -
        levels.begin()));
  }
  McOptions direct_opt = opt;
  direct_opt.check_id =
      opt.check_id + static_cast<std::uint32_t>(epsilons.size()) + 1;
  const Estimate direct = detail::chunked_mean(n, direct_opt, [&](RngStream& rng) {
    thread_local std::vector<double> chain;
    chain.resize(levels.size());
    detail::level_chain(laws, t, rng, chain);
    double paired = 0.0;
    for (std::size_t k = 0; k < atom_rows.size(); ++k) {
      paired += mu.atoms()[k].weight * chain[atom_rows[k]];
    }
    return std::exp(-paired);
  });
  detail::push_item(report, "direct E[exp(-<Y,mu>)] vs exp(-t*Phi(1))",
                    std::exp(-t * sol.phi), direct);
  for (std::size_t e = 0; e < entrance_estimates.size(); ++e) {
    // Delta method: se(exp(t I)) = exp(t I) * t * se(I).
    const Estimate transformed{
        std::exp(t * entrance_estimates[e].mean),
        std::exp(t * entrance_estimates[e].mean) * t *
            entrance_estimates[e].std_error,
        entrance_estimates[e].n};
    CheckItem item;
    item.label =
        "exp(t*I(eps=" + std::to_string(epsilons[e]) + ")) vs direct sheet";
    item.analytic = direct.mean;
    item.estimate = transformed;
    item.z = detail::z_between(transformed, direct);
    item.pass = std::abs(item.z) <= item.gate;
    report.items.push_back(item);
    report.pass = report.pass && item.pass;
  }

  report.runtime_seconds = watch.seconds();
  return report;
}

// Compensator convention for the two-parameter exponential martingale:
// XiAtA uses +xi(a)t (the literal display), XiAtZero uses +xi(0)t (the
// flow-invariant compensator). Under XiAtZero every mean is 1; under XiAtA
// the mean carries the predictable factor exp(t (xi(a) - xi(0))).
enum class Compensator { XiAtA, XiAtZero };

inline CheckReport check_martingale(BranchKind branch,
                                    const HalfLineMeasure& mu, double lambda,
                                    std::span<const double> a_checkpoints,
                                    double t, std::size_t n,
                                    Compensator compensator,
                                    const McOptions& opt) {
  if (!mu.is_atomic()) {
    throw std::invalid_argument("check_martingale: mu must be atomic");
  }
  if (a_checkpoints.empty()) {
    throw std::invalid_argument("check_martingale: need at least one checkpoint");
  }
  detail::Stopwatch watch;
  CheckReport report;
  report.name = std::string("martingale-") + branch_name(branch) + "-" +
                (compensator == Compensator::XiAtZero ? "xi-at-zero" : "xi-at-a");
  report.seed = opt.master_seed;

  const double theta = drift_theta(branch);
  const SpectralSolution sol =
      riccati_solve(theta, mu, lambda, BoundaryVariant::Plain);

  const std::vector<double> levels = detail::lattice_for(mu, a_checkpoints);
  const std::vector<JumpLaw> laws = detail::gap_laws(branch, levels);

  // Per checkpoint: its lattice row, its xi value (right-continuous, so the
  // atom at the checkpoint itself sits in the integral term, not in xi), and
  // the rows/weights of the atoms with location <= checkpoint.
  struct CheckpointPlan {
    double a = 0.0;
    std::size_t row = 0;
    double xi = 0.0;
    double compensator_rate = 0.0;
    std::vector<std::pair<std::size_t, double>> integral_terms;
  };
  std::vector<CheckpointPlan> plans;
  for (double a : a_checkpoints) {
    CheckpointPlan plan;
    plan.a = a;
    const auto it = std::lower_bound(levels.begin(), levels.end(), a);
    if (it == levels.end() || *it != a) {
      throw std::invalid_argument("check_martingale: checkpoint off-lattice");
    }
    plan.row = static_cast<std::size_t>(it - levels.begin());
    plan.xi = xi_profile(sol, a);
    plan.compensator_rate =
        compensator == Compensator::XiAtZero ? sol.phi : plan.xi;
    for (const Atom& atom : mu.atoms()) {
      if (atom.location <= a) {
        const auto ait =
            std::lower_bound(levels.begin(), levels.end(), atom.location);
        plan.integral_terms.emplace_back(
            static_cast<std::size_t>(ait - levels.begin()),
            lambda * atom.weight);
      }
    }
    plans.push_back(std::move(plan));
  }

  const std::vector<Estimate> estimates = detail::chunked_mean_rows(
      n, plans.size(), opt, [&](RngStream& rng, std::vector<double>& row) {
        thread_local std::vector<double> chain;
        chain.resize(levels.size());
        detail::level_chain(laws, t, rng, chain);
        for (std::size_t k = 0; k < plans.size(); ++k) {
          const CheckpointPlan& plan = plans[k];
          double exponent = -plan.xi * chain[plan.row] + plan.compensator_rate * t;
          for (const auto& [r, w] : plan.integral_terms) {
            exponent -= w * chain[r];
          }
          row[k] = std::exp(exponent);
        }
      });

  for (std::size_t k = 0; k < plans.size(); ++k) {
    const double predicted =
        compensator == Compensator::XiAtZero
            ? 1.0
            : std::exp(t * (plans[k].xi - sol.phi));
    detail::push_item(report,
                      "E[M(a=" + std::to_string(plans[k].a) + ")]", predicted,
                      estimates[k]);
  }

  report.runtime_seconds = watch.seconds();
  return report;
}

// Brownian local times at inverse local time, by random walk. The walk with
// space step h (time step h^2) only touches the levels 0 and a through its
// visit counts, so the embedded visit chain is sampled exactly: from a
// 0-visit the next marked visit is at a with probability h/(2a), from an
// a-visit the walk escapes to 0 with probability h/(2a), and the runs of
// repeated visits are geometric. Each visit carries local time h/2, the
// normalization under which the counts converge to the Besq branch sheet.
// Stops at the first visit making the level-0 local time exceed t; returns
// one vector of n samples of l^a per requested level.
inline std::vector<std::vector<double>> rayknight_localtimes(
    double t, std::span<const double> a_points, double step, std::size_t n,
    RngStream& rng) {
  if (!(step > 0.0) || step > 1e-3) {
    throw std::invalid_argument(
        "rayknight_localtimes: need 0 < step <= 1e-3 (coarser steps rejected)");
  }
  if (!(t > 0.0) || t > 2.0) {
    throw std::invalid_argument("rayknight_localtimes: need 0 < t <= 2");
  }
  const double visit_mass = step / 2.0;
  // First visit count N with N * visit_mass > t, counting the start at 0.
  const std::uint64_t n_zero_visits =
      static_cast<std::uint64_t>(std::floor(t / visit_mass)) + 1;
  const std::uint64_t gaps = n_zero_visits - 1;

  auto geometric1 = [&](double p) -> std::uint64_t {
    const double g = std::ceil(std::log(rng.uniform()) / std::log1p(-p));
    return g < 1.0 ? 1 : static_cast<std::uint64_t>(g);
  };

  std::vector<std::vector<double>> out;
  out.reserve(a_points.size());
  for (double a : a_points) {
    if (!(a >= 0.0)) {
      throw std::invalid_argument("rayknight_localtimes: levels must be >= 0");
    }
    std::vector<double> samples(n);
    if (a == 0.0) {
      std::fill(samples.begin(), samples.end(),
                static_cast<double>(n_zero_visits) * visit_mass);
      out.push_back(std::move(samples));
      continue;
    }
    const std::uint64_t lattice_a =
        static_cast<std::uint64_t>(std::llround(a / step));
    if (lattice_a == 0) {
      throw std::invalid_argument(
          "rayknight_localtimes: level below one lattice step");
    }
    const double p = 1.0 / (2.0 * static_cast<double>(lattice_a));
    for (std::size_t s = 0; s < n; ++s) {
      std::uint64_t pos = 0;
      std::uint64_t visits_at_a = 0;
      for (;;) {
        pos += geometric1(p);
        if (pos > gaps) break;
        visits_at_a += geometric1(p);
      }
      samples[s] = static_cast<double>(visits_at_a) * visit_mass;
    }
    out.push_back(std::move(samples));
  }
  return out;
}

// Confronts random-walk local times with the Besq branch sheet: for each
// level, the walk's mean local time must sit within 3 sigma of t, and a
// two-sample KS test against sheet draws of Y_{a,t} must clear p > 0.005.
// The gate is loose: this is a cross-literature sanity identification, not
// a headline identity.
inline CheckReport check_rayknight(double t, std::span<const double> a_points,
                                   double step, std::size_t n,
                                   const McOptions& opt) {
  detail::Stopwatch watch;
  CheckReport report;
  report.name = "rayknight-besq";
  report.seed = opt.master_seed;

  // The walk itself is cheap; it runs on one serial stream so the samples
  // are independent of the thread count.
  RngStream walk_rng(opt.master_seed, chunk_stream_id(opt, 0x10000));
  const std::vector<std::vector<double>> walk =
      rayknight_localtimes(t, a_points, step, n, walk_rng);

  for (std::size_t k = 0; k < a_points.size(); ++k) {
    const double a = a_points[k];
    const Estimate mean_est = mc_estimate(walk[k]);
    detail::push_item(report, "E[l^{" + std::to_string(a) + "}] vs t", t,
                      mean_est);
    if (a == 0.0) continue;

    std::vector<double> sheet_draws(n);
    const std::vector<double> levels{0.0, a};
    const std::vector<JumpLaw> laws = detail::gap_laws(BranchKind::Besq, levels);
    McOptions sub = opt;
    sub.check_id = opt.check_id + static_cast<std::uint32_t>(k) + 1;
    for_each_chunk(n, sub,
                   [&](std::size_t, std::size_t begin, std::size_t end,
                       RngStream& rng) {
                     double chain[2];
                     for (std::size_t r = begin; r < end; ++r) {
                       detail::level_chain(laws, t, rng, chain);
                       sheet_draws[r] = chain[1];
                     }
                   });

    const KsResult ks = ks2(walk[k], sheet_draws);
    CheckItem item;
    item.label = "KS(l^{" + std::to_string(a) + "}, besq Y_{a,t})";
    item.kind = "ks";
    item.analytic = 0.0;
    item.estimate = Estimate{ks.p, 0.0, n};
    item.z = ks.d;
    item.gate = 0.005;
    item.pass = ks.p > item.gate;
    report.items.push_back(std::move(item));
    report.pass = report.pass && report.items.back().pass;
  }

  report.runtime_seconds = watch.seconds();
  return report;
}

}  // namespace subsheet

#endif  // SUBSHEET_VERIFY_HPP
