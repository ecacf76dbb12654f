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

#ifndef VPJOIN_HARNESS_EXPERIMENT_HPP_
#define VPJOIN_HARNESS_EXPERIMENT_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vpjoin/adult.hpp"
#include "vpjoin/bounds.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/harness/run.hpp"
#include "vpjoin/harness/stats.hpp"
#include "vpjoin/predicate.hpp"

namespace vpjoin::harness {

enum class ExperimentKind {
  kBoundComparison,
  kErrorVsSampleSize,
  kAlgorithmComparison,
  kHeuristicConvergence,
  kAdult,
};

inline constexpr ExperimentKind kAllExperiments[] = {
    ExperimentKind::kBoundComparison, ExperimentKind::kErrorVsSampleSize,
    ExperimentKind::kAlgorithmComparison,
    ExperimentKind::kHeuristicConvergence, ExperimentKind::kAdult,
};

inline const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kBoundComparison: return "bound-comparison";
    case ExperimentKind::kErrorVsSampleSize: return "error-vs-sample-size";
    case ExperimentKind::kAlgorithmComparison: return "algorithm-comparison";
    case ExperimentKind::kHeuristicConvergence: return "heuristic-convergence";
    case ExperimentKind::kAdult: return "adult";
  }
  return "?";
}

inline ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : kAllExperiments) {
    if (name == experiment_name(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

inline std::vector<double> default_sample_ratios(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kErrorVsSampleSize: return {0.01, 0.05, 0.1, 0.2};
    case ExperimentKind::kAlgorithmComparison: return {0.1};
    case ExperimentKind::kAdult: return {0.1, 0.2, 0.3, 0.4, 0.5};
    default: return {};
  }
}

inline std::vector<Algorithm> default_algorithms(ExperimentKind k) {
  if (k == ExperimentKind::kHeuristicConvergence) return {Algorithm::kHeuristic};
  return {Algorithm::kNaiveSeq, Algorithm::kNaivePar,  Algorithm::kSampleSeq,
          Algorithm::kSamplePar, Algorithm::kHeuristic,
          Algorithm::kHeuristicSample};
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kErrorVsSampleSize;
  std::uint64_t dataset_size = 100000;
  std::uint64_t providers = 10;
  // Predicate ratio; the mean mu for the KL bound in bound-comparison.
  double ratio = 0.7;
  // Unset means the kind's default grid.
  std::optional<std::vector<double>> sample_ratios;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;
  std::optional<std::string> output;
  // bound-comparison
  double epsilon = 0.01;
  // algorithm-comparison and heuristic-convergence; unset means the default set
  std::optional<std::vector<Algorithm>> algorithms;
  double heuristic_delta = 0.1;
  double confidence = 0.05;
  // adult
  std::string adult_path = "data/adult.data";
  std::string sex = "Male";
  bool normalize = false;

  std::vector<double> ratios_or_default() const {
    return sample_ratios ? *sample_ratios : default_sample_ratios(kind);
  }
  std::vector<Algorithm> algorithms_or_default() const {
    return algorithms ? *algorithms : default_algorithms(kind);
  }

  void validate() const {
    if (repeats == 0) throw ConfigError("repeats must be >= 1");
    for (double s : ratios_or_default()) {
      if (!(s > 0.0 && s <= 1.0)) {
        throw ConfigError("sample ratios must lie in (0, 1]");
      }
    }
    if (kind == ExperimentKind::kAdult) {
      if (sex != "Male" && sex != "Female") {
        throw ConfigError("sex must be Male or Female");
      }
      return;
    }
    if (dataset_size == 0) throw ConfigError("dataset size must be >= 1");
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
      throw ConfigError("ratio must lie in [0, 1]");
    }
    if (kind == ExperimentKind::kBoundComparison) {
      if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("epsilon must lie in (0, 1)");
      }
      return;
    }
    if (providers == 0) throw ConfigError("providers must be >= 1");
    if (kind == ExperimentKind::kHeuristicConvergence) {
      for (auto a : algorithms_or_default()) {
        if (a != Algorithm::kHeuristic && a != Algorithm::kHeuristicSample) {
          throw ConfigError(std::string("heuristic-convergence cannot run ") +
                            algorithm_name(a));
        }
      }
    }
    if (kind == ExperimentKind::kAlgorithmComparison) {
      for (auto a : algorithms_or_default()) {
        if (uses_crypto(a)) {
          throw ConfigError(std::string("algorithm-comparison cannot run ") +
                            algorithm_name(a));
        }
      }
    }
  }

  RunConfig run_config(Algorithm a) const {
    RunConfig rc;
    rc.algorithm = a;
    rc.dataset_size = dataset_size;
    rc.providers = providers;
    rc.ratios = {ratio};
    rc.heuristic_delta = heuristic_delta;
    rc.confidence = confidence;
    rc.seed = seed;
    rc.data_seed = seed;
    rc.repeats = repeats;
    rc.normalize = normalize;
    return rc;
  }
};

namespace detail {

inline GroupKey base_key(const ExperimentConfig& cfg, const char* algorithm) {
  GroupKey key;
  key.experiment = experiment_name(cfg.kind);
  key.algorithm = algorithm;
  key.n = cfg.dataset_size;
  key.k = cfg.providers;
  key.r = cfg.ratio;
  return key;
}

// Hoeffding, Serfling and KL-form confidence over m in {1} and N j / 100.
inline std::vector<StatRow> bound_comparison(const ExperimentConfig& cfg) {
  const std::uint64_t n = cfg.dataset_size;
  std::set<std::uint64_t> grid{1};
  for (std::uint64_t j = 1; j <= 100; ++j) {
    grid.insert(std::max<std::uint64_t>(1, n * j / 100));
  }
  const double mu = cfg.ratio;
  const bool kl = mu > 0.0 && mu + cfg.epsilon < 1.0;
  std::vector<Measurement> ms;
  for (auto m : grid) {
    auto add = [&](const char* name, double value) {
      GroupKey key = base_key(cfg, name);
      key.k = 0;
      key.m = m;
      key.sample_ratio = static_cast<double>(m) / static_cast<double>(n);
      ms.push_back({key, value, {}});
    };
    add("hoeffding", bounds::hoeffding_confidence(m, cfg.epsilon));
    add("serfling", bounds::serfling_confidence(m, cfg.epsilon, n));
    if (kl) {
      add("hoeffding-exact",
          bounds::hoeffding_exact_confidence(m, cfg.epsilon, mu));
    }
  }
  return summarize(ms);
}

// Relative error of the sampled parallel estimate after each provider.
inline std::vector<StatRow> error_vs_sample_size(const ExperimentConfig& cfg) {
  const auto ratios = cfg.ratios_or_default();
  RunConfig rc = cfg.run_config(Algorithm::kSamplePar);
  Workload w(generate_synthetic(rc.synthetic()));
  struct Job {
    double ratio;
    std::size_t j;
  };
  std::vector<Job> jobs;
  for (double s : ratios) {
    for (std::size_t j = 0; j < cfg.repeats; ++j) jobs.push_back({s, j});
  }
  auto records = parallel_map(jobs.size(), [&](std::size_t i) {
    RunConfig c = rc;
    c.sampling.sample_ratio = jobs[i].ratio;
    return execute_run(c, w, cfg.seed + jobs[i].j);
  });
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& rec = records[i];
    for (std::size_t d = 0; d < w.k(); ++d) {
      GroupKey key = base_key(cfg, algorithm_name(rec.algorithm));
      key.sample_ratio = jobs[i].ratio;
      key.m = sample_size_for_ratio(w.n(), jobs[i].ratio);
      key.datasets_intersected = d + 1;
      ms.push_back({key,
                    relative_error(rec.prefix_estimates[d], w.prefix_exact()[d],
                                   w.n(), cfg.normalize),
                    rec.ledger});
    }
  }
  return summarize(ms);
}

// Error and cost of every algorithm on one population; sampled algorithms
// once per sample ratio.
inline std::vector<StatRow> algorithm_comparison(const ExperimentConfig& cfg) {
  RunConfig base = cfg.run_config(Algorithm::kNaiveSeq);
  Workload w(generate_synthetic(base.synthetic()));
  struct Job {
    RunConfig rc;
    std::optional<double> ratio;
    std::size_t j;
  };
  std::vector<Job> jobs;
  for (auto a : cfg.algorithms_or_default()) {
    std::vector<std::optional<double>> ratios;
    if (uses_sample(a)) {
      for (double s : cfg.ratios_or_default()) ratios.push_back(s);
    } else {
      ratios.push_back(std::nullopt);
    }
    for (auto s : ratios) {
      RunConfig rc = cfg.run_config(a);
      rc.sampling.sample_ratio = s;
      rc.validate();
      for (std::size_t j = 0; j < cfg.repeats; ++j) jobs.push_back({rc, s, j});
    }
  }
  auto records = parallel_map(jobs.size(), [&](std::size_t i) {
    return execute_run(jobs[i].rc, w, cfg.seed + jobs[i].j);
  });
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    GroupKey key = base_key(cfg, algorithm_name(jobs[i].rc.algorithm));
    key.sample_ratio = jobs[i].ratio;
    if (jobs[i].ratio) key.m = sample_size_for_ratio(w.n(), *jobs[i].ratio);
    key.datasets_intersected = w.k();
    ms.push_back({key, records[i].relative_error, records[i].ledger});
  }
  return summarize(ms);
}

// Heuristic bounds per iteration; run j draws its own population from
// seed + j because the exact heuristic has no other randomness.
inline std::vector<StatRow> heuristic_convergence(const ExperimentConfig& cfg) {
  std::vector<Measurement> ms;
  for (auto a : cfg.algorithms_or_default()) {
    RunConfig rc = cfg.run_config(a);
    rc.validate();
    auto records = parallel_map(cfg.repeats, [&](std::size_t j) {
      RunConfig c = rc;
      c.data_seed = cfg.seed + j;
      Workload w(generate_synthetic(c.synthetic()));
      return execute_run(c, w, cfg.seed + j);
    });
    const std::string name = algorithm_name(a);
    for (const auto& rec : records) {
      for (const auto& step : *rec.trace) {
        for (int side = 0; side < 2; ++side) {
          const std::string label = name + (side ? ":upper" : ":lower");
          GroupKey key = base_key(cfg, label.c_str());
          key.datasets_intersected = step.iteration;
          ms.push_back({key, side ? step.bounds.upper : step.bounds.lower,
                        rec.ledger});
        }
      }
    }
  }
  return summarize(ms);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

// Exact size and the sampled estimate per sample ratio on the 4-provider
// adult split: age >= 30, never married, the given sex, income > 50K.
inline std::vector<StatRow> adult_experiment(const std::string& path,
                                             const std::string& sex,
                                             const std::vector<double>& ratios,
                                             std::size_t repeats,
                                             std::uint64_t seed = 1) {
  if (repeats == 0) throw ConfigError("repeats must be >= 1");
  auto datasets = load_adult(
      path, {{"age"}, {"marital-status"}, {"sex"}, {"income"}});
  std::vector<Predicate> preds{
      parse_predicate("age>=30"),
      Comparison{"marital-status", CompareOp::kEqual,
                 Value(std::string("Never-married"))},
      Comparison{"sex", CompareOp::kEqual, Value(sex)},
      Comparison{"income", CompareOp::kEqual, Value(std::string(">50K"))},
  };
  Workload w(std::move(datasets), std::move(preds));
  auto key_for = [&](const std::string& algorithm) {
    GroupKey key;
    key.experiment = experiment_name(ExperimentKind::kAdult);
    key.algorithm = algorithm;
    key.n = w.n();
    key.k = w.k();
    key.datasets_intersected = w.k();
    return key;
  };

  std::vector<Measurement> ms;
  {
    CostLedger ledger;
    auto res = naive_parallel(w.endpoints(), ledger);
    GroupKey key = key_for("exact:" + sex);
    key.sample_ratio = 1.0;
    key.m = w.n();
    ms.push_back({key, res.estimated_size, ledger});
  }
  RunConfig rc;
  rc.algorithm = Algorithm::kSamplePar;
  struct Job {
    double ratio;
    std::size_t j;
  };
  std::vector<Job> jobs;
  for (double s : ratios) {
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("sample ratios must lie in (0, 1]");
    for (std::size_t j = 0; j < repeats; ++j) jobs.push_back({s, j});
  }
  auto records = parallel_map(jobs.size(), [&](std::size_t i) {
    RunConfig c = rc;
    c.sampling.sample_ratio = jobs[i].ratio;
    return execute_run(c, w, seed + jobs[i].j);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    GroupKey key = key_for("sample-par:" + sex);
    key.sample_ratio = jobs[i].ratio;
    key.m = sample_size_for_ratio(w.n(), jobs[i].ratio);
    ms.push_back({key, records[i].estimate, records[i].ledger});
  }
  return summarize(ms);
}

// Runs the experiment and, when an output path is set, writes its CSV.
inline std::vector<StatRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<std::ofstream> out;
  if (cfg.output) out.emplace(detail::open_output(*cfg.output));
  std::vector<StatRow> rows;
  switch (cfg.kind) {
    case ExperimentKind::kBoundComparison:
      rows = detail::bound_comparison(cfg);
      break;
    case ExperimentKind::kErrorVsSampleSize:
      rows = detail::error_vs_sample_size(cfg);
      break;
    case ExperimentKind::kAlgorithmComparison:
      rows = detail::algorithm_comparison(cfg);
      break;
    case ExperimentKind::kHeuristicConvergence:
      rows = detail::heuristic_convergence(cfg);
      break;
    case ExperimentKind::kAdult:
      rows = adult_experiment(cfg.adult_path, cfg.sex, cfg.ratios_or_default(),
                              cfg.repeats, cfg.seed);
      break;
  }
  if (out) {
    write_stat_csv(*out, rows);
    out->flush();
    if (!*out) throw IoError("write to '" + *cfg.output + "' failed");
  }
  return rows;
}

inline std::string stat_csv(std::span<const StatRow> rows) {
  std::ostringstream os;
  write_stat_csv(os, rows);
  return os.str();
}

}  // namespace vpjoin::harness

#endif  // VPJOIN_HARNESS_EXPERIMENT_HPP_
