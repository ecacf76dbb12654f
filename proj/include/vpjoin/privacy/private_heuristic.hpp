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

#ifndef VPJOIN_PRIVACY_PRIVATE_HEURISTIC_HPP_
#define VPJOIN_PRIVACY_PRIVATE_HEURISTIC_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vpjoin/bounds.hpp"
#include "vpjoin/heuristic.hpp"
#include "vpjoin/ledger.hpp"
#include "vpjoin/predicate.hpp"
#include "vpjoin/privacy/homomorphic.hpp"
#include "vpjoin/privacy/laplace.hpp"
#include "vpjoin/privacy/psi_ca.hpp"
#include "vpjoin/protocols.hpp"
#include "vpjoin/sampling.hpp"

namespace vpjoin::privacy {

class PrivateProvider;

template <AdditiveHomomorphic S>
BnPsiCaResult private_intersection_size(
    std::span<const std::reference_wrapper<const PrivateProvider>> group,
    const PrivacyParams& params, const S& scheme, Rng& rng,
    CostLedger& ledger, const PsiOptions& options, Transcript* transcript);

// Provider side of the private protocol. Keeps its predicate set over the
// agreed bucket to itself; the client only ever sees noisy sizes.
class PrivateProvider {
 public:
  PrivateProvider(const ProviderDataset& dataset, const Predicate& predicate,
                  const SampleSpec& spec, CostLedger& ledger)
      : provider_id_(dataset.provider_id()), dataset_size_(dataset.size()) {
    BoundPredicate bound(dataset, predicate);
    const auto rows = bucket_rows(dataset, spec);
    std::vector<RecordId> ids;
    for (auto row : rows) {
      if (bound(dataset[row])) ids.push_back(dataset[row].id);
    }
    ledger.add_predicate_evaluations(rows.size());
    ledger.add_messages(1);  // receives spec + predicate
    bucket_size_ = rows.size();
    set_ = IdSet::from_unsorted(std::move(ids));
  }

  int provider_id() const { return provider_id_; }
  std::uint64_t dataset_size() const { return dataset_size_; }
  std::uint64_t bucket_size() const { return bucket_size_; }

  NoisyCount publish_size(double epsilon, Rng& rng, CostLedger& ledger) const {
    ledger.add_messages(1);
    return noisy_count(set_.size(), epsilon, rng);
  }

 private:
  template <AdditiveHomomorphic S>
  friend BnPsiCaResult private_intersection_size(
      std::span<const std::reference_wrapper<const PrivateProvider>> group,
      const PrivacyParams& params, const S& scheme, Rng& rng,
      CostLedger& ledger, const PsiOptions& options, Transcript* transcript);

  int provider_id_;
  std::uint64_t dataset_size_;
  std::uint64_t bucket_size_ = 0;
  IdSet set_;
};

// Runs the noisy PSI-CA among the group's providers, the client relaying
// every message. The first provider learns the noisy count and forwards it.
// Every transferred set is padded to the bucket size.
template <AdditiveHomomorphic S>
BnPsiCaResult private_intersection_size(
    std::span<const std::reference_wrapper<const PrivateProvider>> group,
    const PrivacyParams& params, const S& scheme, Rng& rng,
    CostLedger& ledger, const PsiOptions& options, Transcript* transcript) {
  std::vector<IdSet> sets;
  std::uint64_t pad_to = 0;
  for (const auto& p : group) {
    sets.push_back(p.get().set_);
    pad_to = std::max(pad_to, p.get().bucket_size_);
  }
  PsiOptions opt = options;
  opt.pad_to = std::max(opt.pad_to, pad_to);
  auto res = bn_psi_ca_multi(std::span<const IdSet>(sets), params, scheme, rng,
                             ledger, opt, transcript);
  ledger.add_messages(1);
  if (transcript) {
    transcript->record("P" + std::to_string(group.front().get().provider_id()),
                       "client", "noisy-count", 1);
  }
  return res;
}

// Heuristic bound tightening over noisy bucket counts. Initial bounds come
// from Laplace-perturbed predicate-set sizes; every merge reruns the noisy
// PSI-CA from scratch over all providers in the merged group. Sizes are
// scaled from the bucket to the population by N / (bucket size).
template <AdditiveHomomorphic S>
IntersectionResult private_heuristic_intersection(
    std::span<const PrivateProvider> providers, double delta,
    const PrivacyParams& params, const S& scheme, Rng& rng,
    CostLedger& ledger, Transcript* transcript = nullptr,
    const PsiOptions& options = {}) {
  params.validate();
  if (providers.size() < 2) {
    throw DomainError("private heuristic needs at least 2 providers");
  }
  if (!(delta >= 0.0)) throw DomainError("heuristic delta must be >= 0");
  const std::uint64_t n = providers[0].dataset_size();
  const std::uint64_t m = providers[0].bucket_size();

  IntersectionResult res;
  res.exact = false;
  res.sample_size = m;
  if (m == 0) {
    res.degenerate_sample = true;
    res.ledger = ledger;
    return res;
  }
  auto scale = [&](double count) {
    return std::max(0.0, count) * static_cast<double>(n) /
           static_cast<double>(m);
  };

  struct Noise {
    int holder = -1;  // provider id that knows the last merge's noise
  };
  std::vector<vpjoin::detail::WorkingSet<Noise>> sets;
  std::vector<double> sizes;
  for (std::size_t i = 0; i < providers.size(); ++i) {
    auto c = providers[i].publish_size(params.epsilon, rng, ledger);
    if (transcript) {
      transcript->record("P" + std::to_string(providers[i].provider_id()),
                         "client", "noisy-count", 1);
    }
    res.epsilon_spent += c.epsilon_spent;
    sizes.push_back(scale(std::min<double>(static_cast<double>(c.value),
                                           static_cast<double>(m))));
    sets.push_back({{i}, {}});
  }

  auto merge = [&](const vpjoin::detail::WorkingSet<Noise>& a,
                   const vpjoin::detail::WorkingSet<Noise>& b) {
    std::vector<std::size_t> members = a.providers;
    members.insert(members.end(), b.providers.begin(), b.providers.end());
    std::sort(members.begin(), members.end());
    std::vector<std::reference_wrapper<const PrivateProvider>> group;
    for (auto i : members) group.emplace_back(providers[i]);
    auto out = private_intersection_size(
        std::span<const std::reference_wrapper<const PrivateProvider>>(group),
        params, scheme, rng, ledger, options, transcript);
    res.epsilon_spent += out.noisy.epsilon_spent;
    const double estimate =
        std::min(out.estimate(), static_cast<double>(m));
    return std::make_pair(scale(estimate),
                          Noise{group.back().get().provider_id()});
  };
  const double limit = delta * static_cast<double>(n) / 2.0;
  auto run = vpjoin::detail::run_heuristic<Noise>(
      std::move(sets), std::move(sizes), n,
      [limit](std::size_t) { return limit; }, merge);

  res.estimated_size = run.remaining_sets == 1 ? run.final_size
                                               : run.final_bounds.midpoint();
  res.trace = std::move(run.trace);
  res.ledger = ledger;
  return res;
}

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_PRIVATE_HEURISTIC_HPP_
