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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vpjoin/harness/config.hpp"
#include "vpjoin/harness/experiment.hpp"
#include "vpjoin/harness/run.hpp"
#include "vpjoin/harness/stats.hpp"

namespace vpjoin::harness {
namespace {

const std::string kAdultPath = std::string(VPJOIN_DATA_DIR) + "/adult.data";

GroupKey key_of(std::string experiment, std::string algorithm) {
  GroupKey key;
  key.experiment = std::move(experiment);
  key.algorithm = std::move(algorithm);
  return key;
}

std::vector<Measurement> values(const std::vector<double>& v) {
  std::vector<Measurement> out;
  for (double x : v) out.push_back({key_of("e", "a"), x, {}});
  return out;
}

TEST(SummarizeTest, ConstantGroup) {
  auto rows = summarize(values({1, 1, 1}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean, 1.0);
  EXPECT_EQ(rows[0].std, 0.0);
  EXPECT_EQ(rows[0].repeats, 3u);
  EXPECT_FALSE(rows[0].single_run);
}

TEST(SummarizeTest, TwoPointUnbiasedStd) {
  auto rows = summarize(values({0, 2}));
  EXPECT_DOUBLE_EQ(rows[0].mean, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].std, std::sqrt(2.0));
}

TEST(SummarizeTest, SingleRunFlag) {
  auto rows = summarize(values({5}));
  EXPECT_TRUE(rows[0].single_run);
  EXPECT_EQ(rows[0].std, 0.0);
}

TEST(SummarizeTest, EmptyIsDomainError) {
  EXPECT_THROW(summarize({}), DomainError);
}

TEST(SummarizeTest, PermutationInvariant) {
  Rng rng(3);
  std::vector<Measurement> ms;
  for (int i = 0; i < 200; ++i) {
    GroupKey key = key_of("e", i % 3 ? "x" : "y");
    key.m = static_cast<std::uint64_t>(i % 4);
    CostLedger l;
    l.add_messages(rng.uniform_index(100));
    ms.push_back({key, rng.uniform01() * 1e6 - 5e5, l});
  }
  std::ostringstream a;
  write_stat_csv(a, summarize(ms));
  for (int t = 0; t < 5; ++t) {
    std::shuffle(ms.begin(), ms.end(), rng);
    std::ostringstream b;
    write_stat_csv(b, summarize(ms));
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(SummarizeTest, RowsOrderedByKey) {
  std::vector<Measurement> ms;
  for (std::uint64_t m : {30u, 10u, 20u}) {
    GroupKey key = key_of("e", "a");
    key.m = m;
    ms.push_back({key, 1.0, {}});
  }
  auto rows = summarize(ms);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(*rows[0].key.m, 10u);
  EXPECT_EQ(*rows[2].key.m, 30u);
}

TEST(SummarizeTest, LedgerColumnsAveraged) {
  std::vector<Measurement> ms = values({1, 2});
  ms[0].ledger.add_records_transferred(10);
  ms[1].ledger.add_records_transferred(20);
  EXPECT_DOUBLE_EQ(summarize(ms)[0].records_transferred, 15.0);
}

TEST(FormatTest, Numbers) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1000000.0), "1000000");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(252.0), "252");
  EXPECT_EQ(format_number(1e-9), "1e-09");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ParseTest, UnknownNamesAreConfigErrors) {
  EXPECT_THROW(parse_algorithm("naive"), ConfigError);
  EXPECT_THROW(parse_experiment("fig3"), ConfigError);
  EXPECT_THROW(parse_bound("chernoff"), ConfigError);
  EXPECT_THROW(parse_crypto("rsa"), ConfigError);
  for (auto a : kAllAlgorithms) EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  for (auto k : kAllExperiments) {
    EXPECT_EQ(parse_experiment(experiment_name(k)), k);
  }
}

TEST(SampleSizingTest, Resolve) {
  SampleSizing s;
  s.sample_ratio = 0.1;
  EXPECT_EQ(s.resolve(100000), 10000u);
  SampleSizing h;
  h.epsilon = 0.01;
  h.delta = 0.01;
  EXPECT_EQ(h.resolve(100000), 23026u);
  EXPECT_EQ(h.resolve(1000), 1000u);
  h.two_sided = true;
  EXPECT_EQ(h.resolve(100000), bounds::sample_size_hoeffding(0.01, 0.005));
  h.two_sided = false;
  h.bound = BoundKind::kSerfling;
  EXPECT_EQ(h.resolve(100000), 18717u);
}

TEST(SampleSizingTest, InvalidCombinations) {
  SampleSizing none;
  EXPECT_THROW(none.resolve(10), ConfigError);
  SampleSizing both;
  both.sample_ratio = 0.1;
  both.epsilon = 0.1;
  both.delta = 0.1;
  EXPECT_THROW(both.validate(), ConfigError);
  SampleSizing half;
  half.epsilon = 0.1;
  EXPECT_THROW(half.validate(), ConfigError);
  SampleSizing bad;
  bad.sample_ratio = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(RunConfigTest, Validation) {
  RunConfig c;
  c.algorithm = Algorithm::kSamplePar;
  EXPECT_THROW(c.validate(), ConfigError);
  c.sampling.sample_ratio = 0.1;
  EXPECT_NO_THROW(c.validate());
  c.repeats = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.repeats = 1;
  c.algorithm = Algorithm::kPrivateHeuristic;
  c.privacy.noise_in_hash = true;
  EXPECT_THROW(c.validate(), ConfigError);
  c.privacy.noise_in_hash = false;
  c.privacy.epsilon = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  RunConfig one;
  one.algorithm = Algorithm::kHeuristicSample;
  one.providers = 1;
  EXPECT_THROW(one.validate(), ConfigError);
}

RunConfig small_config(Algorithm a) {
  RunConfig c;
  c.algorithm = a;
  c.dataset_size = 3000;
  c.providers = 4;
  c.ratios = {0.8};
  c.sampling.sample_ratio = 0.2;
  c.seed = 11;
  c.repeats = 6;
  return c;
}

TEST(WorkloadTest, PrefixExactMatchesBruteForce) {
  auto cfg = small_config(Algorithm::kNaivePar);
  auto datasets = generate_synthetic(cfg.synthetic());
  Workload w(generate_synthetic(cfg.synthetic()));
  for (std::size_t i = 0; i < w.k(); ++i) {
    std::vector<ProviderDataset> prefix(datasets.begin(), datasets.begin() + i + 1);
    EXPECT_EQ(w.prefix_exact()[i],
              static_cast<double>(testing::brute_force_intersection(prefix).size()));
  }
}

TEST(RunTest, DeterministicPerSeed) {
  for (auto a : kAllAlgorithms) {
    auto cfg = small_config(a);
    cfg.dataset_size = uses_crypto(a) ? 600 : 3000;
    Workload w(generate_synthetic(cfg.synthetic()));
    auto r1 = execute_run(cfg, w, 5);
    auto r2 = execute_run(cfg, w, 5);
    EXPECT_EQ(r1.estimate, r2.estimate) << algorithm_name(a);
    EXPECT_EQ(r1.ledger, r2.ledger) << algorithm_name(a);
    EXPECT_EQ(r1.m, r2.m) << algorithm_name(a);
  }
}

TEST(RunTest, SeedIsolation) {
  auto cfg = small_config(Algorithm::kSamplePar);
  Workload w(generate_synthetic(cfg.synthetic()));
  auto records = run_repeats(cfg, w);
  ASSERT_EQ(records.size(), cfg.repeats);
  for (std::size_t j = cfg.repeats; j-- > 0;) {
    auto alone = execute_run(cfg, w, cfg.seed + j);
    EXPECT_EQ(records[j].seed, cfg.seed + j);
    EXPECT_EQ(records[j].estimate, alone.estimate);
    EXPECT_EQ(records[j].ledger, alone.ledger);
  }
  std::set<double> distinct;
  for (const auto& r : records) distinct.insert(r.estimate);
  EXPECT_GT(distinct.size(), 1u);
}

TEST(RunTest, ExactIndependentOfSeed) {
  auto cfg = small_config(Algorithm::kSampleSeq);
  auto records = run_synthetic(cfg);
  for (const auto& r : records) EXPECT_EQ(r.exact_size, records[0].exact_size);
  cfg.algorithm = Algorithm::kNaiveSeq;
  EXPECT_EQ(run_synthetic(cfg)[0].estimate, records[0].exact_size);
}

TEST(RunTest, RelativeErrorDenominators) {
  EXPECT_DOUBLE_EQ(relative_error(110, 100, 1000, false), 0.1);
  EXPECT_DOUBLE_EQ(relative_error(110, 100, 1000, true), 0.01);
  EXPECT_DOUBLE_EQ(relative_error(3, 0, 1000, false), 3.0);
}

TEST(RunTest, FixedSampleSpec) {
  auto cfg = small_config(Algorithm::kSamplePar);
  cfg.sampling.sample_ratio.reset();
  cfg.sample_spec = SampleSpec{9, 1, 0};
  auto records = run_synthetic(cfg);
  for (const auto& r : records) EXPECT_EQ(r.estimate, r.exact_size);
}

TEST(RunCsvTest, Columns) {
  auto cfg = small_config(Algorithm::kSamplePar);
  cfg.repeats = 2;
  auto records = run_synthetic(cfg);
  std::ostringstream os;
  write_run_csv(os, cfg, records);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "algorithm,N,k,r,m,seed,estimate,exact_size,relative_error,"
            "records_transferred,predicate_evaluations,messages");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("sample-par,3000,4,0.8,", 0), 0u);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);

  auto mpc = small_config(Algorithm::kSampleMpc);
  mpc.dataset_size = 500;
  mpc.repeats = 1;
  std::ostringstream m;
  write_run_csv(m, mpc, run_synthetic(mpc));
  EXPECT_NE(m.str().find(",messages,ciphertext_operations\n"), std::string::npos);
}

TEST(RunCsvTest, TraceAndTranscript) {
  auto cfg = small_config(Algorithm::kPrivateHeuristic);
  cfg.dataset_size = 500;
  cfg.repeats = 2;
  auto records = run_synthetic(cfg, true);
  ASSERT_TRUE(records[0].trace);
  EXPECT_FALSE(records[0].transcript.empty());
  EXPECT_TRUE(records[1].transcript.empty());
  std::ostringstream t;
  write_trace_csv(t, *records[0].trace);
  EXPECT_EQ(t.str().rfind("iteration,merged_pair,merged_size,lower,upper\n0,,", 0), 0u);
  std::ostringstream s;
  write_transcript(s, records[0].transcript);
  EXPECT_EQ(s.str().rfind("direction,type,payload_size\nP0->client,", 0), 0u);
}

TEST(ConfigTest, RunRoundTrip) {
  RunConfig c = small_config(Algorithm::kPrivateHeuristic);
  c.ratios = {0.5, 0.6, 0.7, 0.8};
  c.sample_spec = SampleSpec{7, 5, 2};
  c.privacy.epsilon = 0.25;
  c.privacy.max_dummies = 12;
  c.crypto = CryptoBackend::kModular;
  c.data_seed = 99;
  c.normalize = true;
  const Json j = to_json(c);
  const RunConfig back = run_config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.sample_spec, c.sample_spec);
  EXPECT_EQ(back.ratios, c.ratios);
}

TEST(ConfigTest, ExperimentRoundTrip) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kAlgorithmComparison;
  c.sample_ratios = std::vector<double>{0.1, 0.2};
  c.algorithms = std::vector<Algorithm>{Algorithm::kNaivePar, Algorithm::kSamplePar};
  c.output = "out.csv";
  const Json j = to_json(c);
  EXPECT_EQ(to_json(experiment_config_from_json(j)), j);
}

TEST(ConfigTest, StrictParsing) {
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"algoritm":"naive-seq"})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"providers":"ten"})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"providers":-1})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"privacy":{"eps":1}})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(
                   R"({"sample_spec":{"hash_seed":1,"bucket_count":2,"bucket_index":2}})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse("[1]")), ConfigError);
  EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"experiment":"fig9"})")),
               ConfigError);
  EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"repeats":3})")),
               ConfigError);
  EXPECT_THROW(parse_json_text("{", "x"), ConfigError);
}

TEST(ExperimentTest, Validation) {
  ExperimentConfig c;
  c.repeats = 0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  ExperimentConfig r;
  r.sample_ratios = std::vector<double>{0.0};
  EXPECT_THROW(run_experiment(r), ConfigError);
  ExperimentConfig h;
  h.kind = ExperimentKind::kHeuristicConvergence;
  h.algorithms = std::vector<Algorithm>{Algorithm::kNaivePar};
  EXPECT_THROW(run_experiment(h), ConfigError);
}

TEST(ExperimentTest, UnwritableOutputIsIoError) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kBoundComparison;
  c.output = "/nonexistent-dir/out.csv";
  EXPECT_THROW(run_experiment(c), IoError);
}

TEST(ExperimentTest, ByteIdenticalReruns) {
  for (auto k : {ExperimentKind::kErrorVsSampleSize,
                 ExperimentKind::kAlgorithmComparison,
                 ExperimentKind::kHeuristicConvergence}) {
    ExperimentConfig c;
    c.kind = k;
    c.dataset_size = 5000;
    c.providers = 5;
    c.repeats = 4;
    EXPECT_EQ(stat_csv(run_experiment(c)), stat_csv(run_experiment(c)))
        << experiment_name(k);
  }
}

TEST(ExperimentTest, ErrorDecreasesWithSampleSize) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kErrorVsSampleSize;
  auto rows = run_experiment(c);
  std::map<std::pair<double, std::uint64_t>, double> mean;
  for (const auto& r : rows) {
    EXPECT_EQ(r.repeats, 10u);
    mean[{*r.key.sample_ratio, *r.key.datasets_intersected}] = r.mean;
  }
  ASSERT_EQ(mean.size(), 40u);
  auto at = [&](double ratio, std::uint64_t d) { return mean[{ratio, d}]; };
  for (std::uint64_t d = 1; d <= 10; ++d) {
    EXPECT_LT(at(0.2, d), at(0.01, d)) << d;
    EXPECT_LT(at(0.1, d), 0.1) << d;
    EXPECT_LT(at(0.2, d), 0.1) << d;
  }
}

TEST(ExperimentTest, AlgorithmComparisonExactAlgorithms) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kAlgorithmComparison;
  c.dataset_size = 20000;
  c.repeats = 3;
  auto rows = run_experiment(c);
  std::map<std::string, StatRow> by;
  for (const auto& r : rows) by[r.key.algorithm] = r;
  ASSERT_EQ(by.size(), 6u);
  EXPECT_EQ(by["naive-seq"].mean, 0.0);
  EXPECT_EQ(by["naive-par"].mean, 0.0);
  EXPECT_LT(by["sample-par"].records_transferred,
            by["naive-par"].records_transferred);
  EXPECT_LT(by["naive-seq"].predicate_evaluations,
            by["naive-par"].predicate_evaluations);
}

TEST(ExperimentTest, HeuristicConvergenceRows) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kHeuristicConvergence;
  c.ratio = 0.95;
  c.repeats = 3;
  auto rows = run_experiment(c);
  std::map<std::uint64_t, double> lower, upper;
  for (const auto& r : rows) {
    (r.key.algorithm == "heuristic:lower" ? lower : upper)[*r.key.datasets_intersected] =
        r.mean;
  }
  ASSERT_FALSE(lower.empty());
  EXPECT_GT(lower[0], 0.0);
  EXPECT_LE(lower.rbegin()->first, 9u);
  EXPECT_EQ(lower.size(), upper.size());
}

TEST(ExperimentTest, BoundComparisonSerflingBelowHoeffding) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kBoundComparison;
  c.epsilon = 0.01;
  c.dataset_size = 100000;
  auto rows = run_experiment(c);
  std::map<std::uint64_t, std::map<std::string, double>> by_m;
  for (const auto& r : rows) by_m[*r.key.m][r.key.algorithm] = r.mean;
  ASSERT_EQ(by_m.size(), 101u);
  for (auto& [m, v] : by_m) {
    ASSERT_EQ(v.size(), 3u);
    if (m > 1) {
      EXPECT_LT(v["serfling"], v["hoeffding"]) << m;
    } else {
      EXPECT_DOUBLE_EQ(v["serfling"], v["hoeffding"]);
    }
    EXPECT_LE(v["hoeffding-exact"], v["hoeffding"]) << m;
  }
}

TEST(AdultExperimentTest, ExactSizesAndShrinkingSpread) {
  for (auto [sex, exact] : {std::pair<std::string, double>{"Male", 252},
                            {"Female", 139}}) {
    auto rows = adult_experiment(kAdultPath, sex, {0.1, 0.5}, 10, 1);
    ASSERT_EQ(rows.size(), 3u);
    std::map<std::string, std::vector<StatRow>> by;
    for (const auto& r : rows) by[r.key.algorithm].push_back(r);
    ASSERT_EQ(by["exact:" + sex].size(), 1u);
    EXPECT_EQ(by["exact:" + sex][0].mean, exact);
    const auto& sampled = by["sample-par:" + sex];
    ASSERT_EQ(sampled.size(), 2u);
    EXPECT_EQ(*sampled[0].key.sample_ratio, 0.1);
    EXPECT_LT(sampled[1].std, sampled[0].std) << sex;
    EXPECT_LE(std::abs(sampled[1].mean - exact), 3 * sampled[1].std) << sex;
  }
}

TEST(AdultExperimentTest, MissingFileIsIngestionError) {
  EXPECT_THROW(adult_experiment("/nonexistent/adult.data", "Male", {0.1}, 1),
               IngestionError);
}

}  // namespace
}  // namespace vpjoin::harness
