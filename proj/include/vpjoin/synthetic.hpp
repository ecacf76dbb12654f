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

#ifndef VPJOIN_SYNTHETIC_HPP_
#define VPJOIN_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin {

struct SyntheticSpec {
  std::size_t dataset_size = 0;
  std::size_t provider_count = 0;
  // One ratio per provider, or a single ratio broadcast to all.
  std::vector<double> satisfaction_ratios;
  std::uint64_t seed = 0;

  static SyntheticSpec uniform(std::size_t n, std::size_t k, double r,
                               std::uint64_t seed) {
    return {n, k, {r}, seed};
  }

  double ratio(std::size_t provider) const {
    return satisfaction_ratios.size() == 1 ? satisfaction_ratios.front()
                                           : satisfaction_ratios.at(provider);
  }

  void validate() const {
    if (dataset_size == 0) throw ConfigError("dataset size must be >= 1");
    if (provider_count == 0) throw ConfigError("provider count must be >= 1");
    if (satisfaction_ratios.size() != 1 &&
        satisfaction_ratios.size() != provider_count) {
      throw ConfigError("need 1 or k satisfaction ratios");
    }
    for (double r : satisfaction_ratios) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw ConfigError("satisfaction ratio must lie in [0, 1]");
      }
    }
  }
};

// k datasets over ids 0..N-1, each with one boolean "label" column drawn
// Bernoulli(r_i) independently per record and per provider. Provider i
// draws from stream i of the seed, so adding providers does not perturb the
// existing ones.
inline std::vector<ProviderDataset> generate_synthetic(
    const SyntheticSpec& spec) {
  spec.validate();
  std::vector<ProviderDataset> out;
  out.reserve(spec.provider_count);
  for (std::size_t p = 0; p < spec.provider_count; ++p) {
    Rng rng = Rng::derive(spec.seed, p);
    const double r = spec.ratio(p);
    std::vector<Record> records(spec.dataset_size);
    for (std::size_t i = 0; i < spec.dataset_size; ++i) {
      records[i].id = i;
      records[i].values.emplace_back(rng.bernoulli(r));
    }
    out.emplace_back(static_cast<int>(p), std::vector<std::string>{"label"},
                     std::move(records));
  }
  return out;
}

}  // namespace vpjoin

#endif  // VPJOIN_SYNTHETIC_HPP_
