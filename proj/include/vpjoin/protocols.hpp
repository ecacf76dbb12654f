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

#ifndef VPJOIN_PROTOCOLS_HPP_
#define VPJOIN_PROTOCOLS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vpjoin/bounds.hpp"
#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/id_set.hpp"
#include "vpjoin/ledger.hpp"
#include "vpjoin/predicate.hpp"
#include "vpjoin/sampling.hpp"

namespace vpjoin {

// Lower/upper bound on the intersection cardinality.
struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;

  double gap() const { return upper - lower; }
  double midpoint() const { return (lower + upper) / 2.0; }
  friend bool operator==(const BoundPair&, const BoundPair&) = default;
};

struct TraceStep {
  std::size_t iteration = 0;  // 0 holds the initial bounds
  std::string merged_pair;    // "" for iteration 0
  double merged_size = 0.0;
  BoundPair bounds;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

using HeuristicTrace = std::vector<TraceStep>;

struct IntersectionResult {
  double estimated_size = 0.0;
  bool exact = false;
  std::optional<IdSet> member_ids;
  CostLedger ledger;
  // Records the estimate rests on: N for full-data runs, the realized
  // bucket size for sampled runs.
  std::uint64_t sample_size = 0;
  // Estimate after intersecting providers 0..i in endpoint order. Entries
  // past an early exit are 0.
  std::vector<double> prefix_estimates;
  std::optional<HeuristicTrace> trace;
  bool degenerate_sample = false;
  bool budget_exhausted = false;
  double epsilon_spent = 0.0;
};

// A provider as seen by the client. Answers predicate queries over its own
// data and nothing else.
class ProviderEndpoint {
 public:
  // With cache_buckets, bucket tables are kept per (hash_seed, b) so that
  // repeated queries against one spec skip the hashing pass. Each table holds
  // every row index, so leave it off when specs change per query. A caching
  // endpoint must not be queried from several threads at once.
  ProviderEndpoint(const ProviderDataset& dataset, const Predicate& predicate,
                   bool cache_buckets = false)
      : dataset_(&dataset), predicate_(dataset, predicate) {
    if (cache_buckets) cache_ = std::make_unique<BucketCache>(dataset);
  }

  int provider_id() const { return dataset_->provider_id(); }
  std::uint64_t dataset_size() const { return dataset_->size(); }

  // p_i(D_i) over the whole dataset.
  IdSet query_all(CostLedger& ledger) const {
    std::vector<RecordId> out;
    for (const auto& r : dataset_->records()) {
      if (predicate_(r)) out.push_back(r.id);
    }
    ledger.add_predicate_evaluations(dataset_->size());
    ledger.add_records_transferred(out.size());
    ledger.add_messages(2);
    return IdSet::from_unsorted(std::move(out));
  }

  // |p_i(D_i)| only; no ids leave the provider.
  std::uint64_t count_all(CostLedger& ledger) const {
    std::uint64_t n = 0;
    for (const auto& r : dataset_->records()) n += predicate_(r) ? 1 : 0;
    ledger.add_predicate_evaluations(dataset_->size());
    ledger.add_messages(2);
    return n;
  }

  // candidates cap p_i(D_i), examining only the candidates.
  IdSet filter(const IdSet& candidates, CostLedger& ledger) const {
    std::vector<RecordId> out;
    for (RecordId id : candidates) {
      const Record* r = dataset_->find(id);
      if (r != nullptr && predicate_(*r)) out.push_back(id);
    }
    ledger.add_records_transferred(candidates.size() + out.size());
    ledger.add_predicate_evaluations(candidates.size());
    ledger.add_messages(2);
    return IdSet::from_sorted_unique(std::move(out));
  }

  struct BucketAnswer {
    IdSet ids;
    std::uint64_t bucket_size = 0;
  };

  // p_i restricted to the spec's bucket, plus the bucket's population.
  BucketAnswer query_bucket(const SampleSpec& spec, CostLedger& ledger) const {
    std::vector<std::size_t> scanned;
    const auto& rows = cache_ ? cache_->rows(spec)
                              : (scanned = bucket_rows(*dataset_, spec));
    std::vector<RecordId> out;
    for (auto row : rows) {
      const Record& r = (*dataset_)[row];
      if (predicate_(r)) out.push_back(r.id);
    }
    ledger.add_predicate_evaluations(rows.size());
    ledger.add_records_transferred(out.size());
    ledger.add_messages(2);
    return {IdSet::from_unsorted(std::move(out)), rows.size()};
  }

  // p_i restricted to the bucket, kept at the provider (for protocols that
  // encrypt it before anything leaves).
  IdSet local_bucket_set(const SampleSpec& spec, CostLedger& ledger) const {
    std::vector<RecordId> out;
    const auto rows = bucket_rows(*dataset_, spec);
    for (auto row : rows) {
      const Record& r = (*dataset_)[row];
      if (predicate_(r)) out.push_back(r.id);
    }
    ledger.add_predicate_evaluations(rows.size());
    ledger.add_messages(1);
    return IdSet::from_unsorted(std::move(out));
  }

  std::uint64_t bucket_size(const SampleSpec& spec) const {
    return cache_ ? cache_->rows(spec).size()
                  : bucket_rows(*dataset_, spec).size();
  }

 private:
  const ProviderDataset* dataset_;
  BoundPredicate predicate_;
  std::unique_ptr<BucketCache> cache_;
};

// provider_filter
inline IdSet provider_filter(const ProviderEndpoint& endpoint,
                             const IdSet& candidates, CostLedger& ledger) {
  return endpoint.filter(candidates, ledger);
}

enum class ProtocolMode { kSequential, kParallel };

namespace detail {

inline void require_endpoints(std::span<const ProviderEndpoint> endpoints,
                              const char* who) {
  if (endpoints.empty()) {
    throw DomainError(std::string(who) + ": no providers given");
  }
}

}  // namespace detail

// L_1 = p_1(D_1), L_i = L_{i-1} cap p_i(D_i); stops once L_i is empty.
inline IntersectionResult naive_sequential(
    std::span<const ProviderEndpoint> endpoints, CostLedger& ledger) {
  detail::require_endpoints(endpoints, "naive_sequential");
  IntersectionResult res;
  res.prefix_estimates.assign(endpoints.size(), 0.0);
  IdSet current = endpoints[0].query_all(ledger);
  res.prefix_estimates[0] = static_cast<double>(current.size());
  for (std::size_t i = 1; i < endpoints.size() && !current.empty(); ++i) {
    current = provider_filter(endpoints[i], current, ledger);
    res.prefix_estimates[i] = static_cast<double>(current.size());
  }
  res.estimated_size = static_cast<double>(current.size());
  res.exact = true;
  res.member_ids = std::move(current);
  res.sample_size = endpoints[0].dataset_size();
  res.ledger = ledger;
  return res;
}

// Every provider ships its full predicate set; the client intersects.
inline IntersectionResult naive_parallel(
    std::span<const ProviderEndpoint> endpoints, CostLedger& ledger) {
  detail::require_endpoints(endpoints, "naive_parallel");
  IntersectionResult res;
  res.prefix_estimates.assign(endpoints.size(), 0.0);
  std::vector<IdSet> sets;
  sets.reserve(endpoints.size());
  for (const auto& ep : endpoints) sets.push_back(ep.query_all(ledger));
  IdSet current = sets[0];
  res.prefix_estimates[0] = static_cast<double>(current.size());
  for (std::size_t i = 1; i < sets.size(); ++i) {
    current = current.intersect(sets[i]);
    res.prefix_estimates[i] = static_cast<double>(current.size());
  }
  res.estimated_size = static_cast<double>(current.size());
  res.exact = true;
  res.member_ids = std::move(current);
  res.sample_size = endpoints[0].dataset_size();
  res.ledger = ledger;
  return res;
}

// Coordinated-bucket sampling: every provider evaluates only the bucket
// named by spec; the sample intersection is scaled by N / (bucket size).
inline IntersectionResult sampled_intersection(
    std::span<const ProviderEndpoint> endpoints, const SampleSpec& spec,
    ProtocolMode mode, CostLedger& ledger) {
  detail::require_endpoints(endpoints, "sampled_intersection");
  spec.validate();
  const std::uint64_t n = endpoints[0].dataset_size();
  IntersectionResult res;
  res.prefix_estimates.assign(endpoints.size(), 0.0);

  auto first = endpoints[0].query_bucket(spec, ledger);
  const std::uint64_t m = first.bucket_size;
  res.sample_size = m;
  auto scale = [&](std::size_t count) {
    return m == 0 ? 0.0 : bounds::scale_up_estimate(count, m, n);
  };

  IdSet current = std::move(first.ids);
  res.prefix_estimates[0] = scale(current.size());
  if (mode == ProtocolMode::kParallel) {
    for (std::size_t i = 1; i < endpoints.size(); ++i) {
      auto answer = endpoints[i].query_bucket(spec, ledger);
      if (answer.bucket_size == 0) res.degenerate_sample = true;
      current = current.intersect(answer.ids);
      res.prefix_estimates[i] = scale(current.size());
    }
  } else {
    for (std::size_t i = 1; i < endpoints.size() && !current.empty(); ++i) {
      current = provider_filter(endpoints[i], current, ledger);
      res.prefix_estimates[i] = scale(current.size());
    }
  }
  if (m == 0) res.degenerate_sample = true;
  res.estimated_size = res.degenerate_sample ? 0.0 : scale(current.size());
  res.exact = false;
  res.ledger = ledger;
  return res;
}

}  // namespace vpjoin

#endif  // VPJOIN_PROTOCOLS_HPP_
