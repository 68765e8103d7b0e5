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

#ifndef SUBSHEET_RNG_HPP
#define SUBSHEET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace subsheet {

namespace detail {

// Finalizer from splitmix64 (Steele/Lea/Flood; Vigna's fixed-increment
// variant). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = UINT64_C(0x9E3779B97F4A7C15);

}  // namespace detail

// Seedable, splittable random stream. Streams are addressed by
// (master_seed, stream_id); the same pair and call sequence reproduces the
// same outputs bit-exactly, and distinct stream ids decorrelate through two
// rounds of 64-bit mixing. One stream must not be shared across threads;
// parallel code hands each worker its own id.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    state_ = detail::mix64(master_seed + detail::kGolden) ^
             detail::mix64(stream_id * UINT64_C(0xD2B74407B1CE6E93) +
                           detail::kGolden);
    state_ = detail::mix64(state_ + detail::kGolden);
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0,1); both endpoints are excluded so
  // log(u) and log1p(-u) are always finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

  // Standard normal via Marsaglia's polar method; the spare deviate is
  // cached, so one call consumes either zero or a variable number of
  // uniforms. Deterministic for a fixed call sequence.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Poisson(mean). Inversion by sequential search below mean 10, Hormann's
  // transformed rejection (PTRS) above; both are exact in law.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean < 0");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? poisson_inversion(mean) : poisson_ptrs(mean);
  }

  // Gamma(shape, 1) with integer shape. Small shapes sum exponentials,
  // large shapes use one Marsaglia-Tsang draw; identical law either way.
  double gamma_integer_shape(std::uint64_t shape) {
    if (shape == 0) return 0.0;
    if (shape < 16) {
      double s = 0.0;
      for (std::uint64_t k = 0; k < shape; ++k) s -= std::log(uniform());
      return s;
    }
    return gamma_marsaglia_tsang(static_cast<double>(shape));
  }

 private:
  std::uint64_t poisson_inversion(double mean) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p <= 0.0 || k > 1000) break;  // cdf saturated in double precision
    }
    return k;
  }

  std::uint64_t poisson_ptrs(double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          -mean + kf * log_mean - std::lgamma(kf + 1.0)) {
        return static_cast<std::uint64_t>(kf);
      }
    }
  }

  double gamma_marsaglia_tsang(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t state_ = 0;
  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace subsheet

#endif  // SUBSHEET_RNG_HPP
