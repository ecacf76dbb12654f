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

#include "vpjoin/heuristic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "vpjoin/synthetic.hpp"

namespace vpjoin {
namespace {

using testing::brute_force_intersection;
using testing::label_endpoints;
using testing::labeled_providers;
using testing::random_positives;

TEST(UpperBoundTest, Examples) {
  std::vector<std::uint64_t> sizes{800, 900, 500, 400};
  EXPECT_EQ(upper_bound(sizes), 400u);
  std::vector<std::uint64_t> one{7};
  EXPECT_EQ(upper_bound(one), 7u);
  std::vector<std::uint64_t> zero{3, 0, 9};
  EXPECT_EQ(upper_bound(zero), 0u);
  std::vector<std::uint64_t> none;
  EXPECT_THROW(upper_bound(none), DomainError);
}

TEST(LowerBoundTest, Examples) {
  std::vector<double> four{0.8, 0.9, 0.5, 0.4};
  EXPECT_EQ(lower_bound(four, 1000), 0.0);
  std::vector<double> three{0.8, 0.9, 0.31};
  EXPECT_NEAR(lower_bound(three, 1000), 10.0, 1e-9);
  std::vector<double> full{1.0, 1.0};
  EXPECT_EQ(lower_bound(full, 1000), 1000.0);
  std::vector<double> none;
  EXPECT_THROW(lower_bound(none, 10), DomainError);
}

TEST(LowerBoundTwoTest, Examples) {
  EXPECT_NEAR(lower_bound_two(0.6, 0.6, 1000, 1000), 200.0, 1e-9);
  EXPECT_EQ(lower_bound_two(0.4, 0.5, 1000, 1000), 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01();
    std::vector<double> r{a, b};
    EXPECT_NEAR(lower_bound_two(a, b, 500, 500), lower_bound(r, 500), 1e-9);
  }
}

TEST(BoundTrackerTest, WorkedExample) {
  std::vector<double> ratios{0.8, 0.9, 0.5, 0.4};
  auto tracker = BoundTracker::from_ratios(ratios, 1000);
  EXPECT_EQ(tracker.bounds(), (BoundPair{0.0, 400.0}));
  auto [a, b] = tracker.two_smallest();
  EXPECT_EQ(tracker.entries()[a].label, "3");
  EXPECT_EQ(tracker.entries()[b].label, "2");
  tracker.merge(a, b, 310.0);
  EXPECT_EQ(tracker.bounds(), (BoundPair{10.0, 310.0}));
  EXPECT_EQ(tracker.count(), 3u);
}

TEST(BoundTrackerTest, TiesPickSmallestProviderIds) {
  std::vector<double> ratios{0.5, 0.7, 0.5, 0.5};
  auto tracker = BoundTracker::from_ratios(ratios, 100);
  auto [a, b] = tracker.two_smallest();
  EXPECT_EQ(tracker.entries()[a].key, 0);
  EXPECT_EQ(tracker.entries()[b].key, 2);
}

// Worked example realized on data: p_3 cap p_4 has exactly 310 members.
std::vector<std::vector<RecordId>> worked_example_positives() {
  std::vector<std::vector<RecordId>> pos(4);
  for (RecordId i = 0; i < 800; ++i) pos[0].push_back(i);
  for (RecordId i = 100; i < 1000; ++i) pos[1].push_back(i);
  for (RecordId i = 0; i < 500; ++i) pos[2].push_back(i);
  for (RecordId i = 190; i < 590; ++i) pos[3].push_back(i);
  return pos;
}

TEST(HeuristicTest, WorkedExampleTrace) {
  auto ds = labeled_providers(1000, worked_example_positives());
  auto eps = label_endpoints(ds);
  CostLedger ledger;
  auto res = heuristic_intersection(eps, 0.0, ledger);
  ASSERT_TRUE(res.trace);
  const auto& trace = *res.trace;
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace[0].bounds, (BoundPair{0.0, 400.0}));
  EXPECT_EQ(trace[1].merged_pair, "3|2");
  EXPECT_EQ(trace[1].merged_size, 310.0);
  EXPECT_EQ(trace[1].bounds, (BoundPair{10.0, 310.0}));
  EXPECT_TRUE(res.exact);
  EXPECT_EQ(*res.member_ids, brute_force_intersection(ds));
  EXPECT_EQ(trace.size(), 4u);
}

TEST(HeuristicTest, LargeDeltaStopsImmediately) {
  auto ds = labeled_providers(1000, worked_example_positives());
  auto eps = label_endpoints(ds);
  CostLedger ledger;
  // Gap 400 <= 1.0 * 1000 / 2.
  auto res = heuristic_intersection(eps, 1.0, ledger);
  EXPECT_EQ(res.trace->size(), 1u);
  EXPECT_FALSE(res.exact);
  EXPECT_EQ(res.estimated_size, 200.0);
  // Only the four counts were requested.
  EXPECT_EQ(ledger.records_transferred(), 0u);
  EXPECT_EQ(ledger.messages(), 8u);
}

TEST(HeuristicTest, EmptyMergeReturnsZero) {
  auto ds = labeled_providers(10, {{0, 1, 2}, {3, 4}, {0, 1, 2, 3, 4, 5}});
  auto eps = label_endpoints(ds);
  CostLedger ledger;
  auto res = heuristic_intersection(eps, 0.0, ledger);
  EXPECT_EQ(res.estimated_size, 0.0);
  EXPECT_EQ(res.trace->size(), 2u);
}

TEST(HeuristicTest, NegativeDeltaIsDomainError) {
  auto ds = labeled_providers(10, {{0}});
  auto eps = label_endpoints(ds);
  CostLedger ledger;
  EXPECT_THROW(heuristic_intersection(eps, -0.1, ledger), DomainError);
}

TEST(HeuristicPropertyTest, ZeroDeltaEqualsNaive) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 1 + rng.uniform_index(7);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < k; ++i) ratios.push_back(0.4 + 0.6 * rng.uniform01());
    auto ds = labeled_providers(200, random_positives(200, ratios, rng));
    auto eps = label_endpoints(ds);
    CostLedger l1, l2;
    auto naive = naive_sequential(eps, l1);
    auto heur = heuristic_intersection(eps, 0.0, l2);
    ASSERT_EQ(heur.estimated_size, naive.estimated_size);
    ASSERT_TRUE(heur.exact);
    ASSERT_EQ(*heur.member_ids, *naive.member_ids);
    ASSERT_LE(heur.trace->size(), k);
  }
}

TEST(HeuristicPropertyTest, BoundsValidMonotoneAndErrorContract) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + rng.uniform_index(8);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < k; ++i) ratios.push_back(0.6 + 0.4 * rng.uniform01());
    auto ds = labeled_providers(300, random_positives(300, ratios, rng));
    auto eps = label_endpoints(ds);
    const double truth = brute_force_intersection(ds).size();
    const double delta = 0.5 * rng.uniform01();
    CostLedger ledger;
    auto res = heuristic_intersection(eps, delta, ledger);
    const auto& trace = *res.trace;
    ASSERT_LE(trace.size(), k);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      ASSERT_LE(trace[i].bounds.lower, trace[i].bounds.upper);
      ASSERT_LE(trace[i].bounds.lower, truth);
      ASSERT_GE(trace[i].bounds.upper, truth);
      if (i > 0) {
        ASSERT_LE(trace[i].bounds.upper, trace[i - 1].bounds.upper);
        ASSERT_GE(trace[i].bounds.lower, trace[i - 1].bounds.lower);
      }
    }
    const auto& last = trace.back().bounds;
    ASSERT_LE(std::abs(res.estimated_size - truth), last.gap() / 2 + 1e-9);
    if (!res.exact) {
      ASSERT_LE(last.gap() / 2, delta * 300 / 4 + 1e-9);
    }
  }
}

TEST(SampledHeuristicTest, NeedsTwoProvidersAndPositiveDelta) {
  auto ds = labeled_providers(10, {{0}, {0}});
  auto eps = label_endpoints(ds);
  CostLedger ledger;
  EXPECT_THROW(heuristic_with_sampling(std::span(eps).first(1), 0.1, ledger),
               DomainError);
  EXPECT_THROW(heuristic_with_sampling(eps, 0.0, ledger), DomainError);
}

TEST(SampledHeuristicTest, TwoProvidersMatchSampledIntersection) {
  auto ds = generate_synthetic(SyntheticSpec::uniform(20000, 2, 0.6, 4));
  auto eps = label_endpoints(ds);
  SampledHeuristicOptions opt;
  opt.spec = SampleSpec{77, 10, 3};
  CostLedger l1, l2;
  // Gap is the smaller set, far above 0.05 N / 2, so one merge happens.
  auto heur = heuristic_with_sampling(eps, 0.05, l1, opt);
  auto samp = sampled_intersection(eps, *opt.spec, ProtocolMode::kSequential, l2);
  ASSERT_EQ(heur.trace->size(), 2u);
  EXPECT_DOUBLE_EQ(heur.estimated_size, samp.estimated_size);
}

TEST(SampledHeuristicTest, SingleBucketReproducesExactTrace) {
  Rng rng(5);
  auto ds = labeled_providers(500, random_positives(500, {0.9, 0.8, 0.85, 0.7, 0.95}, rng));
  auto eps = label_endpoints(ds);
  SampledHeuristicOptions opt;
  opt.spec = SampleSpec{1, 1, 0};
  CostLedger l1, l2;
  // A tiny delta forces both variants down to a single set.
  auto exact = heuristic_intersection(eps, 1e-9, l1);
  auto sampled = heuristic_with_sampling(eps, 1e-9, l2, opt);
  EXPECT_EQ(*exact.trace, *sampled.trace);
  EXPECT_EQ(exact.estimated_size, sampled.estimated_size);
}

TEST(SampledHeuristicTest, DefaultSampleSize) {
  SampledHeuristicOptions opt;
  // m = sample_size_hoeffding(0.1 / 9, 0.05) -> b = ceil(N / m)
  const auto spec = sampled_heuristic_spec(100000, 10, 0.1, opt);
  const auto m = bounds::sample_size_hoeffding(0.1 / 9, 0.05);
  EXPECT_EQ(m, 12133u);
  EXPECT_EQ(spec.bucket_count, bucket_count(100000, m));
}

TEST(SampledHeuristicTest, FullScaleConvergence) {
  const std::uint64_t n = 100000;
  auto ds = generate_synthetic(SyntheticSpec::uniform(n, 10, 0.9, 6));
  auto eps = label_endpoints(ds);
  const double truth = brute_force_intersection(ds).size();
  SampledHeuristicOptions opt;
  opt.seed = 11;
  CostLedger ledger;
  auto res = heuristic_with_sampling(eps, 0.1, ledger, opt);
  EXPECT_FALSE(res.budget_exhausted);
  const auto& trace = *res.trace;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    EXPECT_LE(trace[i].bounds.upper, trace[i - 1].bounds.upper + 1e-9);
    EXPECT_GE(trace[i].bounds.lower, trace[i - 1].bounds.lower - 1e-9);
  }
  EXPECT_LT(std::abs(res.estimated_size - truth) / n, 0.1);
}

TEST(SampledHeuristicTest, BudgetCoversEveryPossibleMerge) {
  // With the counter starting at 0 the threshold before merge i is
  // (delta - delta i / (k - 1)) N / 2 > 0 for every i < k - 1, so a run can
  // always finish its merges inside the budget.
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t k = 2 + rng.uniform_index(6);
    auto ds = generate_synthetic(SyntheticSpec::uniform(3000, k, 0.5, t));
    auto eps = label_endpoints(ds);
    SampledHeuristicOptions opt;
    opt.spec = SampleSpec{std::uint64_t(t), 2, 0};
    CostLedger ledger;
    auto res = heuristic_with_sampling(eps, 0.01, ledger, opt);
    EXPECT_FALSE(res.budget_exhausted);
    EXPECT_EQ(res.trace->size(), k);
  }
}

}  // namespace
}  // namespace vpjoin
