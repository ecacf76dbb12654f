// Copyright 2026 The vpjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VPJOIN_BOUNDS_HPP_
#define VPJOIN_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vpjoin/error.hpp"

// One-sided tail bounds Pr(sample mean - mean >= eps) for binary (or
// [0, B]-bounded) indicators, and their inversion into sample sizes.
namespace vpjoin::bounds {

namespace detail {

inline void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
}

}  // namespace detail

// exp(-2 m eps^2), independent sampling with replacement.
inline double hoeffding_confidence(std::uint64_t m, double epsilon) {
  if (m == 0) throw DomainError("sample size must be >= 1");
  detail::require_epsilon(epsilon);
  return std::exp(-2.0 * static_cast<double>(m) * epsilon * epsilon);
}

// Kullback-Leibler form, always <= hoeffding_confidence:
// [(mu/(mu+eps))^(mu+eps) ((1-mu)/(1-mu-eps))^(1-mu-eps)]^m.
inline double hoeffding_exact_confidence(std::uint64_t m, double epsilon,
                                         double mu) {
  if (m == 0) throw DomainError("sample size must be >= 1");
  detail::require_epsilon(epsilon);
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mu must lie in (0, 1)");
  if (!(mu + epsilon < 1.0)) throw DomainError("mu + epsilon must be < 1");
  const double hi = mu + epsilon;
  const double lo = 1.0 - mu - epsilon;
  const double log_base =
      hi * std::log(mu / hi) + lo * std::log((1.0 - mu) / lo);
  return std::exp(static_cast<double>(m) * log_base);
}

// Serfling: exp{-(2 m eps^2 / B^2) * N / (N - m + 1)}, sampling without
// replacement from a population of N values in [0, B].
inline double serfling_confidence(std::uint64_t m, double epsilon,
                                  std::uint64_t n, double value_bound = 1.0) {
  if (m == 0) throw DomainError("sample size must be >= 1");
  if (m > n) throw DomainError("sample size exceeds population size");
  detail::require_epsilon(epsilon);
  if (!(value_bound > 0.0)) throw DomainError("value bound B must be > 0");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return std::exp(-(2.0 * md * epsilon * epsilon /
                    (value_bound * value_bound)) *
                  (nd / (nd - md + 1.0)));
}

// Union bound over both tails.
inline double two_sided(double one_sided_confidence) {
  return std::min(1.0, 2.0 * one_sided_confidence);
}

// Per-tail failure probability that yields a two-sided delta.
inline double one_sided_delta(double two_sided_delta) {
  return two_sided_delta / 2.0;
}

// Minimal m with exp(-2 m eps^2) <= delta.
inline std::uint64_t sample_size_hoeffding(double epsilon, double delta) {
  detail::require_epsilon(epsilon);
  detail::require_delta(delta);
  const double real_m = std::log(1.0 / delta) / (2.0 * epsilon * epsilon);
  auto m = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(real_m)));
  // Correct the closed form against the bound itself.
  while (m > 1 && hoeffding_confidence(m - 1, epsilon) <= delta) --m;
  while (hoeffding_confidence(m, epsilon) > delta) ++m;
  return m;
}

// Minimal m <= N with serfling_confidence(m) <= delta. With c = 2 eps^2 N / B^2
// and L = ln(1/delta) the condition c m / (N - m + 1) >= L is linear in m:
// m >= L (N + 1) / (c + L).
inline std::uint64_t sample_size_serfling(double epsilon, double delta,
                                          std::uint64_t n,
                                          double value_bound = 1.0) {
  detail::require_epsilon(epsilon);
  detail::require_delta(delta);
  if (n == 0) throw DomainError("population size must be >= 1");
  if (!(value_bound > 0.0)) throw DomainError("value bound B must be > 0");
  const double nd = static_cast<double>(n);
  const double L = std::log(1.0 / delta);
  const double c = 2.0 * epsilon * epsilon * nd / (value_bound * value_bound);
  const double real_m = L * (nd + 1.0) / (c + L);
  if (!(real_m <= nd) || serfling_confidence(n, epsilon, n, value_bound) > delta) {
    throw InfeasibleError("no sample size <= N=" + std::to_string(n) +
                          " reaches delta=" + std::to_string(delta));
  }
  auto m = std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::ceil(real_m)), 1, n);
  while (m > 1 && serfling_confidence(m - 1, epsilon, n, value_bound) <= delta) {
    --m;
  }
  while (m < n && serfling_confidence(m, epsilon, n, value_bound) > delta) {
    ++m;
  }
  return m;
}

// |S cap| * N / m
inline double scale_up_estimate(std::uint64_t sample_intersection,
                                std::uint64_t m, std::uint64_t n) {
  if (m == 0) throw DomainError("scale_up_estimate: sample size is 0");
  if (sample_intersection > m) {
    throw DomainError("sample intersection exceeds sample size");
  }
  return static_cast<double>(sample_intersection) * static_cast<double>(n) /
         static_cast<double>(m);
}

// eps = E / N
inline double absolute_to_relative_error(double absolute_error,
                                         std::uint64_t n) {
  if (n == 0) throw DomainError("population size must be >= 1");
  if (absolute_error < 0.0) throw DomainError("absolute error must be >= 0");
  return absolute_error / static_cast<double>(n);
}

}  // namespace vpjoin::bounds

#endif  // VPJOIN_BOUNDS_HPP_
