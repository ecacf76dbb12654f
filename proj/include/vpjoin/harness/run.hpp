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

#ifndef VPJOIN_HARNESS_RUN_HPP_
#define VPJOIN_HARNESS_RUN_HPP_

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdint>
#include <future>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vpjoin/bounds.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/harness/stats.hpp"
#include "vpjoin/heuristic.hpp"
#include "vpjoin/ledger.hpp"
#include "vpjoin/predicate.hpp"
#include "vpjoin/privacy/commutative.hpp"
#include "vpjoin/privacy/homomorphic.hpp"
#include "vpjoin/privacy/private_heuristic.hpp"
#include "vpjoin/protocols.hpp"
#include "vpjoin/sampling.hpp"
#include "vpjoin/synthetic.hpp"

namespace vpjoin::harness {

enum class Algorithm {
  kNaiveSeq,
  kNaivePar,
  kSampleSeq,
  kSamplePar,
  kHeuristic,
  kHeuristicSample,
  kPrivateHeuristic,
  kSampleMpc,
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kNaiveSeq,         Algorithm::kNaivePar,
    Algorithm::kSampleSeq,        Algorithm::kSamplePar,
    Algorithm::kHeuristic,        Algorithm::kHeuristicSample,
    Algorithm::kPrivateHeuristic, Algorithm::kSampleMpc,
};

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kNaiveSeq: return "naive-seq";
    case Algorithm::kNaivePar: return "naive-par";
    case Algorithm::kSampleSeq: return "sample-seq";
    case Algorithm::kSamplePar: return "sample-par";
    case Algorithm::kHeuristic: return "heuristic";
    case Algorithm::kHeuristicSample: return "heuristic-sample";
    case Algorithm::kPrivateHeuristic: return "private-heuristic";
    case Algorithm::kSampleMpc: return "sample-mpc";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (name == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

inline bool uses_crypto(Algorithm a) {
  return a == Algorithm::kPrivateHeuristic || a == Algorithm::kSampleMpc;
}

inline bool uses_sample(Algorithm a) {
  return a == Algorithm::kSampleSeq || a == Algorithm::kSamplePar ||
         a == Algorithm::kPrivateHeuristic || a == Algorithm::kSampleMpc;
}

inline bool is_heuristic(Algorithm a) {
  return a == Algorithm::kHeuristic || a == Algorithm::kHeuristicSample ||
         a == Algorithm::kPrivateHeuristic;
}

enum class BoundKind { kHoeffding, kSerfling };

inline const char* bound_name(BoundKind b) {
  return b == BoundKind::kHoeffding ? "hoeffding" : "serfling";
}

inline BoundKind parse_bound(std::string_view name) {
  if (name == "hoeffding") return BoundKind::kHoeffding;
  if (name == "serfling") return BoundKind::kSerfling;
  throw ConfigError("unknown bound '" + std::string(name) + "'");
}

enum class CryptoBackend { kPlain, kModular };

inline const char* crypto_name(CryptoBackend c) {
  return c == CryptoBackend::kPlain ? "plain" : "modular";
}

inline CryptoBackend parse_crypto(std::string_view name) {
  if (name == "plain") return CryptoBackend::kPlain;
  if (name == "modular") return CryptoBackend::kModular;
  throw ConfigError("unknown crypto backend '" + std::string(name) + "'");
}

// How a sample size is chosen: a fixed ratio of N, or the minimal m that
// reaches (epsilon, delta) under the chosen bound.
struct SampleSizing {
  std::optional<double> sample_ratio;
  std::optional<double> epsilon;
  std::optional<double> delta;
  BoundKind bound = BoundKind::kHoeffding;
  // delta covers both tails: each bound is solved at delta / 2.
  bool two_sided = false;

  bool specified() const { return sample_ratio || (epsilon && delta); }

  void validate() const {
    if (sample_ratio && (epsilon || delta)) {
      throw ConfigError("give either a sample ratio or epsilon/delta, not both");
    }
    if (epsilon.has_value() != delta.has_value()) {
      throw ConfigError("epsilon and delta must be given together");
    }
    if (sample_ratio && !(*sample_ratio > 0.0 && *sample_ratio <= 1.0)) {
      throw ConfigError("sample ratio must lie in (0, 1]");
    }
  }

  std::uint64_t resolve(std::uint64_t n) const {
    validate();
    if (sample_ratio) return sample_size_for_ratio(n, *sample_ratio);
    if (!(epsilon && delta)) {
      throw ConfigError("sample size needs a sample ratio or epsilon and delta");
    }
    const double d = two_sided ? bounds::one_sided_delta(*delta) : *delta;
    if (bound == BoundKind::kSerfling) {
      return bounds::sample_size_serfling(*epsilon, d, n);
    }
    return std::min<std::uint64_t>(n, bounds::sample_size_hoeffding(*epsilon, d));
  }
};

struct RunConfig {
  Algorithm algorithm = Algorithm::kSamplePar;
  std::uint64_t dataset_size = 100000;
  std::uint64_t providers = 10;
  // One ratio for all providers or one per provider.
  std::vector<double> ratios{0.7};
  SampleSizing sampling;
  // Fixed bucket instead of a random one per run.
  std::optional<SampleSpec> sample_spec;
  double heuristic_delta = 0.1;
  double confidence = 0.05;
  privacy::PrivacyParams privacy;
  CryptoBackend crypto = CryptoBackend::kPlain;
  std::size_t key_bits = 512;
  std::size_t group_bits = 768;
  std::size_t psi_capacity = 4096;
  std::uint64_t seed = 1;
  // Seed of the synthetic population; defaults to seed.
  std::optional<std::uint64_t> data_seed;
  std::size_t repeats = 1;
  bool normalize = false;

  SyntheticSpec synthetic() const {
    return {dataset_size, providers, ratios, data_seed.value_or(seed)};
  }

  void validate() const {
    synthetic().validate();
    sampling.validate();
    if (repeats == 0) throw ConfigError("repeats must be >= 1");
    if (sample_spec) {
      sample_spec->validate();
    } else if (uses_sample(algorithm) && !sampling.specified()) {
      throw ConfigError(std::string(algorithm_name(algorithm)) +
                        " needs --sample-ratio or --epsilon and --delta");
    }
    if (!(heuristic_delta >= 0.0)) throw ConfigError("delta must be >= 0");
    if (algorithm == Algorithm::kHeuristicSample && !(heuristic_delta > 0.0)) {
      throw ConfigError("heuristic-sample needs delta > 0");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
      throw ConfigError("confidence must lie in (0, 1)");
    }
    if ((algorithm == Algorithm::kHeuristicSample ||
         algorithm == Algorithm::kPrivateHeuristic ||
         algorithm == Algorithm::kSampleMpc) &&
        providers < 2) {
      throw ConfigError(std::string(algorithm_name(algorithm)) +
                        " needs at least 2 providers");
    }
    if (uses_crypto(algorithm)) privacy.validate();
  }
};

struct RunRecord {
  Algorithm algorithm = Algorithm::kNaiveSeq;
  std::uint64_t seed = 0;
  std::uint64_t m = 0;
  double estimate = 0.0;
  double exact_size = 0.0;
  double relative_error = 0.0;
  CostLedger ledger;
  std::vector<double> prefix_estimates;
  std::optional<HeuristicTrace> trace;
  std::vector<TranscriptEntry> transcript;
  bool degenerate_sample = false;
  bool budget_exhausted = false;
  double epsilon_spent = 0.0;
};

// Datasets, endpoints and exact answers shared by every run on them.
class Workload {
 public:
  explicit Workload(std::vector<ProviderDataset> datasets,
                    std::vector<Predicate> predicates = {})
      : datasets_(std::move(datasets)) {
    if (datasets_.empty()) throw DomainError("workload has no providers");
    if (predicates.empty()) predicates.assign(datasets_.size(), LabelPredicate{});
    if (predicates.size() != datasets_.size()) {
      throw ConfigError("need one predicate per provider");
    }
    predicates_ = std::move(predicates);
    std::vector<IdSet> sets;
    for (std::size_t i = 0; i < datasets_.size(); ++i) {
      endpoints_.emplace_back(datasets_[i], predicates_[i]);
      sets.push_back(evaluate_predicate(datasets_[i], predicates_[i]));
      prefix_exact_.push_back(static_cast<double>(
          exact_intersection(std::span<const IdSet>(sets)).size()));
    }
  }

  Workload(const Workload&) = delete;
  Workload& operator=(const Workload&) = delete;

  std::uint64_t n() const { return datasets_[0].size(); }
  std::size_t k() const { return datasets_.size(); }
  const std::vector<ProviderDataset>& datasets() const { return datasets_; }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  std::span<const ProviderEndpoint> endpoints() const { return endpoints_; }
  double exact() const { return prefix_exact_.back(); }
  // Exact size of the intersection of providers 0..i.
  const std::vector<double>& prefix_exact() const { return prefix_exact_; }

 private:
  std::vector<ProviderDataset> datasets_;
  std::vector<Predicate> predicates_;
  std::vector<ProviderEndpoint> endpoints_;
  std::vector<double> prefix_exact_;
};

inline double relative_error(double estimate, double exact, std::uint64_t n,
                             bool normalize) {
  const double denom = normalize ? static_cast<double>(n) : std::max(exact, 1.0);
  return std::abs(estimate - exact) / denom;
}

namespace detail {

// Fixed stream ids under each run seed.
inline constexpr std::uint64_t kSpecStream = 1;
inline constexpr std::uint64_t kCryptoStream = 2;
inline constexpr std::uint64_t kKeyStream = 3;

inline SampleSpec run_spec(const RunConfig& cfg, std::uint64_t n,
                           std::uint64_t seed) {
  if (cfg.sample_spec) return *cfg.sample_spec;
  Rng rng = Rng::derive(seed, kSpecStream);
  return make_sample_spec(n, cfg.sampling.resolve(n), rng);
}

template <privacy::AdditiveHomomorphic S>
IntersectionResult run_private(const RunConfig& cfg, const Workload& w,
                               const SampleSpec& spec, const S& scheme,
                               Rng& rng, CostLedger& ledger,
                               Transcript* transcript) {
  std::vector<privacy::PrivateProvider> providers;
  for (std::size_t i = 0; i < w.k(); ++i) {
    providers.emplace_back(w.datasets()[i], w.predicates()[i], spec, ledger);
  }
  privacy::PsiOptions opt;
  opt.max_set_size = cfg.psi_capacity;
  return privacy::private_heuristic_intersection<S>(
      providers, cfg.heuristic_delta, cfg.privacy, scheme, rng, ledger,
      transcript, opt);
}

inline IntersectionResult run_sample_mpc(const RunConfig& cfg,
                                         const Workload& w,
                                         const SampleSpec& spec, Rng& rng,
                                         CostLedger& ledger,
                                         Transcript* transcript) {
  const auto group = privacy::CommutativeGroup::modp(cfg.group_bits);
  std::vector<IdSet> sets;
  for (const auto& ep : w.endpoints()) {
    sets.push_back(ep.local_bucket_set(spec, ledger));
  }
  std::vector<privacy::CommutativeKey> keys;
  for (std::size_t i = 0; i < w.k(); ++i) {
    keys.push_back(privacy::CommutativeKey::generate(group, rng));
  }
  const std::uint64_t m = w.endpoints()[0].bucket_size(spec);
  IntersectionResult res;
  res.sample_size = m;
  if (m == 0) {
    res.degenerate_sample = true;
  } else {
    const auto common = privacy::commutative_intersection_size(
        sets, group, keys, rng, ledger, transcript);
    res.estimated_size = bounds::scale_up_estimate(common, m, w.n());
  }
  res.ledger = ledger;
  return res;
}

}  // namespace detail

// One run of cfg.algorithm on the workload under one seed.
inline RunRecord execute_run(const RunConfig& cfg, const Workload& w,
                             std::uint64_t seed, bool keep_transcript = false) {
  CostLedger ledger;
  Transcript transcript;
  Transcript* tp = keep_transcript ? &transcript : nullptr;
  const std::uint64_t n = w.n();
  IntersectionResult res;
  switch (cfg.algorithm) {
    case Algorithm::kNaiveSeq:
      res = naive_sequential(w.endpoints(), ledger);
      break;
    case Algorithm::kNaivePar:
      res = naive_parallel(w.endpoints(), ledger);
      break;
    case Algorithm::kSampleSeq:
    case Algorithm::kSamplePar: {
      const auto mode = cfg.algorithm == Algorithm::kSampleSeq
                            ? ProtocolMode::kSequential
                            : ProtocolMode::kParallel;
      res = sampled_intersection(w.endpoints(), detail::run_spec(cfg, n, seed),
                                 mode, ledger);
      break;
    }
    case Algorithm::kHeuristic:
      res = heuristic_intersection(w.endpoints(), cfg.heuristic_delta, ledger);
      break;
    case Algorithm::kHeuristicSample: {
      SampledHeuristicOptions opt;
      opt.confidence = cfg.confidence;
      opt.spec = cfg.sample_spec;
      if (cfg.sampling.specified()) opt.sample_size = cfg.sampling.resolve(n);
      opt.seed = Rng::derive(seed, detail::kSpecStream).next_u64();
      res = heuristic_with_sampling(w.endpoints(), cfg.heuristic_delta, ledger,
                                    opt);
      break;
    }
    case Algorithm::kPrivateHeuristic: {
      const SampleSpec spec = detail::run_spec(cfg, n, seed);
      Rng rng = Rng::derive(seed, detail::kCryptoStream);
      if (cfg.crypto == CryptoBackend::kPlain) {
        res = detail::run_private(cfg, w, spec, privacy::PlainScheme{}, rng,
                                  ledger, tp);
      } else {
        Rng key_rng = Rng::derive(seed, detail::kKeyStream);
        auto scheme = privacy::PaillierScheme::generate(cfg.key_bits, key_rng);
        res = detail::run_private(cfg, w, spec, scheme, rng, ledger, tp);
      }
      break;
    }
    case Algorithm::kSampleMpc: {
      Rng rng = Rng::derive(seed, detail::kCryptoStream);
      res = detail::run_sample_mpc(cfg, w, detail::run_spec(cfg, n, seed), rng,
                                   ledger, tp);
      break;
    }
  }

  RunRecord rec;
  rec.algorithm = cfg.algorithm;
  rec.seed = seed;
  rec.m = res.sample_size;
  rec.estimate = res.estimated_size;
  rec.exact_size = w.exact();
  rec.relative_error = relative_error(rec.estimate, rec.exact_size, n,
                                      cfg.normalize);
  rec.ledger = ledger;
  rec.prefix_estimates = std::move(res.prefix_estimates);
  rec.trace = std::move(res.trace);
  rec.transcript = transcript.entries();
  rec.degenerate_sample = res.degenerate_sample;
  rec.budget_exhausted = res.budget_exhausted;
  rec.epsilon_spent = res.epsilon_spent;
  return rec;
}

// fn(j) for j in [0, count), spread over threads; results in index order.
template <class Fn>
auto parallel_map(std::size_t count, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using T = decltype(fn(std::size_t{0}));
  std::vector<std::optional<T>> slots(count);
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t j; (j = next.fetch_add(1)) < count;) slots[j].emplace(fn(j));
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// cfg.repeats runs with seeds seed, seed + 1, ... on one population. Only
// the first run keeps its transcript.
inline std::vector<RunRecord> run_repeats(const RunConfig& cfg,
                                          const Workload& w,
                                          bool keep_transcript = false) {
  cfg.validate();
  return parallel_map(cfg.repeats, [&](std::size_t j) {
    return execute_run(cfg, w, cfg.seed + j, keep_transcript && j == 0);
  });
}

inline std::vector<RunRecord> run_synthetic(const RunConfig& cfg,
                                            bool keep_transcript = false) {
  cfg.validate();
  Workload w(generate_synthetic(cfg.synthetic()));
  return run_repeats(cfg, w, keep_transcript);
}

inline std::string ratio_column(const std::vector<double>& ratios) {
  std::string out;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (i) out += ';';
    out += format_number(ratios[i]);
  }
  return out;
}

inline void write_run_csv(std::ostream& os, const RunConfig& cfg,
                          std::span<const RunRecord> records) {
  const bool crypto = uses_crypto(cfg.algorithm);
  os << "algorithm,N,k,r,m,seed,estimate,exact_size,relative_error,"
        "records_transferred,predicate_evaluations,messages";
  if (crypto) os << ",ciphertext_operations";
  const bool dp = cfg.algorithm == Algorithm::kPrivateHeuristic;
  if (dp) os << ",epsilon_spent";
  os << '\n';
  const std::string r = ratio_column(cfg.ratios);
  for (const auto& rec : records) {
    os << algorithm_name(rec.algorithm) << ',' << cfg.dataset_size << ','
       << cfg.providers << ',' << r << ',' << rec.m << ',' << rec.seed << ','
       << format_number(rec.estimate) << ',' << format_number(rec.exact_size)
       << ',' << format_number(rec.relative_error) << ','
       << rec.ledger.records_transferred() << ','
       << rec.ledger.predicate_evaluations() << ',' << rec.ledger.messages();
    if (crypto) os << ',' << rec.ledger.ciphertext_operations();
    if (dp) os << ',' << format_number(rec.epsilon_spent);
    os << '\n';
  }
}

inline void write_trace_csv(std::ostream& os, const HeuristicTrace& trace) {
  os << "iteration,merged_pair,merged_size,lower,upper\n";
  for (const auto& step : trace) {
    os << step.iteration << ',' << step.merged_pair << ','
       << format_number(step.merged_size) << ','
       << format_number(step.bounds.lower) << ','
       << format_number(step.bounds.upper) << '\n';
  }
}

inline void write_transcript(std::ostream& os,
                             std::span<const TranscriptEntry> entries) {
  os << "direction,type,payload_size\n";
  for (const auto& e : entries) {
    os << e.from << "->" << e.to << ',' << e.type << ',' << e.payload_size
       << '\n';
  }
}

}  // namespace vpjoin::harness

#endif  // VPJOIN_HARNESS_RUN_HPP_
