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

#ifndef VPJOIN_HEURISTIC_HPP_
#define VPJOIN_HEURISTIC_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vpjoin/bounds.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/protocols.hpp"
#include "vpjoin/random.hpp"
#include "vpjoin/sampling.hpp"

namespace vpjoin {

// min_i |p_i(D_i)|
inline std::uint64_t upper_bound(std::span<const std::uint64_t> set_sizes) {
  if (set_sizes.empty()) throw DomainError("upper_bound: no sets");
  return *std::min_element(set_sizes.begin(), set_sizes.end());
}

// max{(sum p_i - (k - 1)) N, 0}
inline double lower_bound(std::span<const double> ratios, std::uint64_t n) {
  if (ratios.empty()) throw DomainError("lower_bound: no ratios");
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  const double k = static_cast<double>(ratios.size());
  return std::max((sum - (k - 1.0)) * static_cast<double>(n), 0.0);
}

// Two-set lower bound with per-set sizes averaged.
inline double lower_bound_two(double ratio1, double ratio2, std::uint64_t n1,
                              std::uint64_t n2) {
  if (ratio1 + ratio2 < 1.0) return 0.0;
  return (ratio1 + ratio2 - 1.0) *
         (static_cast<double>(n1) + static_cast<double>(n2)) / 2.0;
}

// Bounds over the current working sets, all drawn from one population of N
// records. Computed on sizes rather than ratios so integer counts stay
// exact: lower = max(sum sizes - (k - 1) N, 0), upper = min size.
class BoundTracker {
 public:
  struct Entry {
    double size = 0.0;
    int key = 0;  // tie-break: smallest member provider id
    std::string label;
  };

  BoundTracker(std::vector<Entry> entries, std::uint64_t n)
      : entries_(std::move(entries)), n_(static_cast<double>(n)) {
    if (entries_.empty()) throw DomainError("BoundTracker: no sets");
  }

  static BoundTracker from_ratios(std::span<const double> ratios,
                                  std::uint64_t n) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      e.push_back({ratios[i] * static_cast<double>(n), static_cast<int>(i),
                   std::to_string(i)});
    }
    return BoundTracker(std::move(e), n);
  }

  std::size_t count() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  BoundPair bounds() const {
    double sum = 0.0;
    double lo_size = entries_.front().size;
    for (const auto& e : entries_) {
      sum += e.size;
      lo_size = std::min(lo_size, e.size);
    }
    const double k = static_cast<double>(entries_.size());
    return {std::max(sum - (k - 1.0) * n_, 0.0), lo_size};
  }

  // Indices of the two smallest sets, ordered (smallest first).
  std::pair<std::size_t, std::size_t> two_smallest() const {
    if (entries_.size() < 2) throw DomainError("need two sets to merge");
    std::vector<std::size_t> idx(entries_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(),
                      [this](std::size_t a, std::size_t b) {
                        const auto& x = entries_[a];
                        const auto& y = entries_[b];
                        if (x.size != y.size) return x.size < y.size;
                        return x.key < y.key;
                      });
    return {idx[0], idx[1]};
  }

  // Replaces entries a and b by their intersection; returns its index.
  std::size_t merge(std::size_t a, std::size_t b, double merged_size) {
    Entry merged{merged_size, std::min(entries_[a].key, entries_[b].key),
                 entries_[a].label + "+" + entries_[b].label};
    const auto hi = std::max(a, b);
    const auto lo = std::min(a, b);
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(hi));
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(lo));
    entries_.push_back(std::move(merged));
    return entries_.size() - 1;
  }

 private:
  std::vector<Entry> entries_;
  double n_;
};

namespace detail {

// A working set of the heuristic: which providers it covers, plus whatever
// the variant keeps about it (ids held by the client, nothing, ...).
template <class Payload>
struct WorkingSet {
  std::vector<std::size_t> providers;
  Payload payload;
};

template <class Payload>
struct HeuristicRun {
  HeuristicTrace trace;
  std::vector<WorkingSet<Payload>> sets;
  BoundPair final_bounds;
  std::size_t remaining_sets = 0;
  double final_size = 0.0;  // valid when remaining_sets == 1
  bool hit_empty = false;
  bool budget_exhausted = false;
};

// Shared loop. threshold(i) is the stopping gap before merge i (0-based);
// merge(a, b) returns {size, payload} of a cap b.
template <class Payload, class ThresholdFn, class MergeFn>
HeuristicRun<Payload> run_heuristic(std::vector<WorkingSet<Payload>> sets,
                           std::vector<double> sizes, std::uint64_t n,
                           ThresholdFn threshold, MergeFn merge) {
  std::vector<BoundTracker::Entry> entries;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    int key = static_cast<int>(sets[i].providers.front());
    entries.push_back({sizes[i], key, std::to_string(key)});
  }
  BoundTracker tracker(std::move(entries), n);
  HeuristicRun<Payload> run;
  run.trace.push_back({0, "", 0.0, tracker.bounds()});

  std::size_t iteration = 0;
  while (tracker.count() > 1) {
    const double limit = threshold(iteration);
    const BoundPair b = tracker.bounds();
    if (!(b.gap() > limit)) break;
    if (limit <= 0.0 && threshold(0) > 0.0) {
      run.budget_exhausted = true;
      break;
    }
    auto [i, j] = tracker.two_smallest();
    const std::string pair_label =
        tracker.entries()[i].label + "|" + tracker.entries()[j].label;
    auto [merged_size, payload] = merge(sets[i], sets[j]);

    WorkingSet<Payload> merged;
    merged.providers = sets[i].providers;
    merged.providers.insert(merged.providers.end(), sets[j].providers.begin(),
                            sets[j].providers.end());
    std::sort(merged.providers.begin(), merged.providers.end());
    merged.payload = std::move(payload);
    const auto hi = std::max(i, j);
    const auto lo = std::min(i, j);
    sets.erase(sets.begin() + static_cast<std::ptrdiff_t>(hi));
    sets.erase(sets.begin() + static_cast<std::ptrdiff_t>(lo));
    sets.push_back(std::move(merged));
    tracker.merge(i, j, merged_size);

    ++iteration;
    run.trace.push_back({iteration, pair_label, merged_size, tracker.bounds()});
    if (merged_size <= 0.0) {
      run.hit_empty = true;
      break;
    }
  }
  run.final_bounds = tracker.bounds();
  run.remaining_sets = tracker.count();
  if (tracker.count() == 1) run.final_size = tracker.entries().front().size;
  run.sets = std::move(sets);
  return run;
}

inline void require_delta(double delta) {
  if (!(delta >= 0.0)) throw DomainError("heuristic delta must be >= 0");
}

}  // namespace detail

// Bound-tightening heuristic over exact pairwise intersections. Starts from
// predicate-set sizes only; a merge pulls ids from a provider or reuses the
// ids the client already holds for a merged set.
inline IntersectionResult heuristic_intersection(
    std::span<const ProviderEndpoint> endpoints, double delta,
    CostLedger& ledger) {
  detail::require_endpoints(endpoints, "heuristic_intersection");
  detail::require_delta(delta);
  const std::uint64_t n = endpoints[0].dataset_size();

  using Held = std::optional<IdSet>;
  std::vector<detail::WorkingSet<Held>> sets;
  std::vector<double> sizes;
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    sizes.push_back(static_cast<double>(endpoints[i].count_all(ledger)));
    sets.push_back({{i}, std::nullopt});
  }

  auto merge = [&](const detail::WorkingSet<Held>& a,
                   const detail::WorkingSet<Held>& b) {
    IdSet out;
    if (a.payload && b.payload) {
      out = a.payload->intersect(*b.payload);
    } else if (a.payload) {
      out = provider_filter(endpoints[b.providers.front()], *a.payload, ledger);
    } else if (b.payload) {
      out = provider_filter(endpoints[a.providers.front()], *b.payload, ledger);
    } else {
      IdSet ids = endpoints[a.providers.front()].query_all(ledger);
      out = provider_filter(endpoints[b.providers.front()], ids, ledger);
    }
    const double size = static_cast<double>(out.size());
    return std::make_pair(size, Held(std::move(out)));
  };
  const double limit = delta * static_cast<double>(n) / 2.0;
  auto run = detail::run_heuristic<Held>(
      std::move(sets), std::move(sizes), n,
      [limit](std::size_t) { return limit; }, merge);

  IntersectionResult res;
  if (run.remaining_sets == 1) {
    res.estimated_size = run.final_size;
    res.exact = true;
    auto& last = run.sets.front().payload;
    res.member_ids = last ? std::move(*last)
                          : endpoints[run.sets.front().providers.front()]
                                .query_all(ledger);
  } else if (run.hit_empty) {
    res.estimated_size = 0.0;
    res.exact = true;
    res.member_ids = IdSet{};
  } else {
    res.estimated_size = run.final_bounds.midpoint();
  }
  res.sample_size = n;
  res.trace = std::move(run.trace);
  res.ledger = ledger;
  return res;
}

struct SampledHeuristicOptions {
  // Confidence for sizing the per-merge sample.
  double confidence = 0.05;
  // Overrides the Hoeffding-derived sample size.
  std::optional<std::uint64_t> sample_size;
  // Overrides the randomly drawn sample spec.
  std::optional<SampleSpec> spec;
  std::uint64_t seed = 0;
};

// Resolves the sample spec the sampled heuristic will use.
inline SampleSpec sampled_heuristic_spec(std::uint64_t n, std::size_t k,
                                         double delta,
                                         const SampledHeuristicOptions& opt) {
  if (opt.spec) return *opt.spec;
  std::uint64_t m = opt.sample_size
                        ? *opt.sample_size
                        : bounds::sample_size_hoeffding(
                              delta / static_cast<double>(k - 1),
                              opt.confidence);
  m = std::clamp<std::uint64_t>(m, 1, n);
  Rng rng(opt.seed);
  return make_sample_spec(n, m, rng);
}

// Heuristic whose pairwise intersections run on one coordinated sample,
// each merge debiting delta / (k - 1) from the stopping threshold.
inline IntersectionResult heuristic_with_sampling(
    std::span<const ProviderEndpoint> endpoints, double delta,
    CostLedger& ledger, const SampledHeuristicOptions& options = {}) {
  if (endpoints.size() < 2) {
    throw DomainError("heuristic_with_sampling: need at least 2 providers");
  }
  if (!(delta > 0.0)) throw DomainError("heuristic_with_sampling: delta <= 0");
  const std::uint64_t n = endpoints[0].dataset_size();
  const std::size_t k = endpoints.size();
  const SampleSpec spec = sampled_heuristic_spec(n, k, delta, options);
  const std::uint64_t m = endpoints[0].bucket_size(spec);

  using Held = std::optional<IdSet>;  // ids inside the sample bucket
  std::vector<detail::WorkingSet<Held>> sets;
  std::vector<double> sizes;
  for (std::size_t i = 0; i < k; ++i) {
    sizes.push_back(static_cast<double>(endpoints[i].count_all(ledger)));
    sets.push_back({{i}, std::nullopt});
  }

  auto merge = [&](const detail::WorkingSet<Held>& a,
                   const detail::WorkingSet<Held>& b) {
    IdSet out;
    if (a.payload && b.payload) {
      out = a.payload->intersect(*b.payload);
    } else if (a.payload) {
      out = provider_filter(endpoints[b.providers.front()], *a.payload, ledger);
    } else if (b.payload) {
      out = provider_filter(endpoints[a.providers.front()], *b.payload, ledger);
    } else {
      auto answer = endpoints[a.providers.front()].query_bucket(spec, ledger);
      out = provider_filter(endpoints[b.providers.front()], answer.ids, ledger);
    }
    const double size =
        m == 0 ? 0.0 : bounds::scale_up_estimate(out.size(), m, n);
    return std::make_pair(size, Held(std::move(out)));
  };
  const double step = delta / static_cast<double>(k - 1);
  const double nd = static_cast<double>(n);
  auto run = detail::run_heuristic<Held>(
      std::move(sets), std::move(sizes), n,
      [=](std::size_t i) {
        return (delta - step * static_cast<double>(i)) * nd / 2.0;
      },
      merge);

  IntersectionResult res;
  res.estimated_size = run.remaining_sets == 1 ? run.final_size
                                               : run.final_bounds.midpoint();
  res.exact = false;
  res.sample_size = m;
  res.degenerate_sample = m == 0;
  res.budget_exhausted = run.budget_exhausted;
  res.trace = std::move(run.trace);
  res.ledger = ledger;
  return res;
}

}  // namespace vpjoin

#endif  // VPJOIN_HEURISTIC_HPP_
