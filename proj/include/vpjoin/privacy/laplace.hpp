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

#ifndef VPJOIN_PRIVACY_LAPLACE_HPP_
#define VPJOIN_PRIVACY_LAPLACE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vpjoin/error.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin::privacy {

struct PrivacyParams {
  double epsilon = 1.0;
  // Dummy-count cap for the noisy PSI-CA; noise is centered at
  // max_dummies / 2 and lives in [0, max_dummies].
  std::uint64_t max_dummies = 20;
  // Perturbing the id hash instead of the predicate output. Reserved; no
  // mechanism exists for it and enabling it is rejected.
  bool noise_in_hash = false;

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("privacy epsilon must be > 0");
    if (noise_in_hash) {
      throw ConfigError("noise in the hash function is not implemented");
    }
  }
};

// Released count after output perturbation.
struct NoisyCount {
  std::uint64_t value = 0;
  double epsilon_spent = 0.0;
};

// Laplace(0, scale) by inverse CDF: -b sgn(u) ln(1 - 2|u|), u in (-1/2, 1/2).
inline double laplace_sample(double scale, Rng& rng) {
  if (!(scale > 0.0)) throw DomainError("laplace scale must be > 0");
  const double u = rng.uniform_open01() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

// round(count + Lap(1/eps)) floored at 0. Sensitivity of a count is 1.
inline NoisyCount noisy_count(std::uint64_t true_count, double epsilon,
                              Rng& rng) {
  if (!(epsilon > 0.0)) throw ConfigError("privacy epsilon must be > 0");
  const double noisy =
      static_cast<double>(true_count) + laplace_sample(1.0 / epsilon, rng);
  const double rounded = std::max(0.0, std::round(noisy));
  return {static_cast<std::uint64_t>(rounded), epsilon};
}

// Two-sided geometric (discrete Laplace) Pr(z) ~ exp(-eps |z|), drawn as the
// difference of two geometric variables and rejected outside [lo, hi].
inline std::int64_t truncated_discrete_laplace(double epsilon, std::int64_t lo,
                                               std::int64_t hi, Rng& rng) {
  if (lo > hi) throw DomainError("empty discrete Laplace support");
  if (!std::isfinite(epsilon)) return std::clamp<std::int64_t>(0, lo, hi);
  if (!(epsilon > 0.0)) throw ConfigError("privacy epsilon must be > 0");
  const double log_alpha = -epsilon;  // ln Pr(geometric >= 1)
  auto geometric = [&] {
    // floor(ln U / ln alpha) on (0, 1)
    return static_cast<std::int64_t>(
        std::floor(std::log(rng.uniform_open01()) / log_alpha));
  };
  while (true) {
    const std::int64_t z = geometric() - geometric();
    if (z >= lo && z <= hi) return z;
  }
}

// Dummy count for one party: shift + noise, clipped into [0, max_dummies].
struct DummyDraw {
  std::uint64_t count = 0;
  std::int64_t noise = 0;  // count - shift
};

inline DummyDraw draw_dummy_count(const PrivacyParams& params, Rng& rng) {
  const auto shift = static_cast<std::int64_t>(params.max_dummies / 2);
  const auto top = static_cast<std::int64_t>(params.max_dummies) - shift;
  const auto z = truncated_discrete_laplace(params.epsilon, -shift, top, rng);
  return {static_cast<std::uint64_t>(shift + z), z};
}

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_LAPLACE_HPP_
