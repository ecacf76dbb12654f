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

#ifndef VPJOIN_SAMPLING_HPP_
#define VPJOIN_SAMPLING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin {

// Shared sampling contract sent by the client to every provider. Providers
// holding the same ids materialize the same bucket from it.
struct SampleSpec {
  std::uint64_t hash_seed = 0;
  std::uint64_t bucket_count = 1;
  std::uint64_t bucket_index = 0;

  void validate() const {
    if (bucket_count == 0) throw DomainError("bucket count must be >= 1");
    if (bucket_index >= bucket_count) {
      throw DomainError("bucket index " + std::to_string(bucket_index) +
                        " out of range [0, " + std::to_string(bucket_count) +
                        ")");
    }
  }

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

// ceil(N / m)
inline std::uint64_t bucket_count(std::uint64_t n, std::uint64_t m) {
  if (n == 0) throw DomainError("bucket_count: N must be >= 1");
  if (m == 0 || m > n) {
    throw DomainError("bucket_count: sample size must lie in [1, N]");
  }
  return (n + m - 1) / m;
}

// Keyed id hash: mix64(id ^ mix64(hash_seed)). Frozen; changing it changes
// every sample and breaks golden outputs.
constexpr std::uint64_t bucket_hash(RecordId id, std::uint64_t hash_seed) {
  return mix64(id ^ mix64(hash_seed));
}

inline std::uint64_t assign_bucket(RecordId id, const SampleSpec& spec) {
  return bucket_hash(id, spec.hash_seed) % spec.bucket_count;
}

// Fresh hash seed and a uniform bucket index, drawn in that order.
inline SampleSpec make_sample_spec(std::uint64_t n, std::uint64_t m,
                                   Rng& rng) {
  SampleSpec spec;
  spec.bucket_count = bucket_count(n, m);
  spec.hash_seed = rng.next_u64();
  spec.bucket_index = rng.uniform_index(spec.bucket_count);
  return spec;
}

// Sample of round(ratio * N) records, at least one.
inline std::uint64_t sample_size_for_ratio(std::uint64_t n, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ConfigError("sample ratio must lie in (0, 1]");
  }
  auto m = static_cast<std::uint64_t>(std::llround(ratio * n));
  return std::clamp<std::uint64_t>(m, 1, n);
}

// Row indices (dataset order) of the records in the spec's bucket.
inline std::vector<std::size_t> bucket_rows(const ProviderDataset& dataset,
                                            const SampleSpec& spec) {
  spec.validate();
  std::vector<std::size_t> rows;
  if (spec.bucket_count == 1) {
    rows.resize(dataset.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (assign_bucket(dataset[i].id, spec) == spec.bucket_index) {
      rows.push_back(i);
    }
  }
  return rows;
}

inline std::vector<Record> sample_bucket(const ProviderDataset& dataset,
                                         const SampleSpec& spec) {
  std::vector<Record> out;
  for (auto row : bucket_rows(dataset, spec)) out.push_back(dataset[row]);
  return out;
}

// All b buckets of one dataset for one hash seed, computed in one pass.
class BucketTable {
 public:
  BucketTable(const ProviderDataset& dataset, std::uint64_t hash_seed,
              std::uint64_t bucket_count)
      : hash_seed_(hash_seed), buckets_(bucket_count) {
    if (bucket_count == 0) throw DomainError("bucket count must be >= 1");
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      buckets_[bucket_hash(dataset[i].id, hash_seed) % bucket_count]
          .push_back(i);
    }
  }

  std::uint64_t hash_seed() const { return hash_seed_; }
  std::uint64_t bucket_count() const { return buckets_.size(); }
  const std::vector<std::size_t>& rows(std::uint64_t bucket_index) const {
    return buckets_.at(bucket_index);
  }

 private:
  std::uint64_t hash_seed_;
  std::vector<std::vector<std::size_t>> buckets_;
};

// Precomputed bucket tables for one dataset, keyed by (hash_seed, b).
class BucketCache {
 public:
  explicit BucketCache(const ProviderDataset& dataset) : dataset_(dataset) {}

  std::shared_ptr<const BucketTable> table(std::uint64_t hash_seed,
                                           std::uint64_t bucket_count) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(hash_seed, bucket_count);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    auto t = std::make_shared<const BucketTable>(dataset_, hash_seed,
                                                 bucket_count);
    tables_.emplace(key, t);
    return t;
  }

  const std::vector<std::size_t>& rows(const SampleSpec& spec) {
    spec.validate();
    return table(spec.hash_seed, spec.bucket_count)->rows(spec.bucket_index);
  }

  std::size_t cached_tables() const {
    std::lock_guard lock(mu_);
    return tables_.size();
  }

 private:
  const ProviderDataset& dataset_;
  mutable std::mutex mu_;
  std::map<std::pair<std::uint64_t, std::uint64_t>,
           std::shared_ptr<const BucketTable>>
      tables_;
};

}  // namespace vpjoin

#endif  // VPJOIN_SAMPLING_HPP_
