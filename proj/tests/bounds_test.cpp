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

#include "vpjoin/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "vpjoin/predicate.hpp"
#include "vpjoin/random.hpp"
#include "vpjoin/sampling.hpp"
#include "vpjoin/synthetic.hpp"

namespace vpjoin::bounds {
namespace {

TEST(HoeffdingTest, ReferenceSampleSize) {
  EXPECT_EQ(sample_size_hoeffding(0.01, 0.01), 23026u);
  EXPECT_LE(hoeffding_confidence(23026, 0.01), 0.01);
  EXPECT_GT(hoeffding_confidence(23025, 0.01), 0.01);
  // exp(-4.6052)
  EXPECT_NEAR(hoeffding_confidence(23026, 0.01), 0.0099997, 1e-7);
}

TEST(HoeffdingTest, DerivedSampleSize) {
  // ceil(ln(100) / 0.02) = ceil(230.26)
  EXPECT_EQ(sample_size_hoeffding(0.1, 0.01), 231u);
}

TEST(HoeffdingTest, ExponentLinearity) {
  for (std::uint64_t m : {1u, 10u, 500u}) {
    EXPECT_NEAR(hoeffding_confidence(2 * m, 0.03),
                std::pow(hoeffding_confidence(m, 0.03), 2), 1e-15);
  }
  EXPECT_NEAR(hoeffding_confidence(100, 1e-9), 1.0, 1e-12);
}

TEST(HoeffdingTest, Preconditions) {
  EXPECT_THROW(hoeffding_confidence(0, 0.1), DomainError);
  EXPECT_THROW(hoeffding_confidence(5, 0.0), DomainError);
  EXPECT_THROW(sample_size_hoeffding(0.1, 0.0), DomainError);
  EXPECT_THROW(sample_size_hoeffding(0.1, 1.0), DomainError);
}

TEST(HoeffdingTest, SampleSizeMinimality) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double eps = 0.005 + 0.2 * rng.uniform01();
    const double delta = 0.001 + 0.5 * rng.uniform01();
    const auto m = sample_size_hoeffding(eps, delta);
    EXPECT_LE(hoeffding_confidence(m, eps), delta);
    if (m > 1) {
      EXPECT_GT(hoeffding_confidence(m - 1, eps), delta);
    }
  }
}

TEST(HoeffdingExactTest, ClosedFormAtRandomPoints) {
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t m = 1 + rng.uniform_index(2000);
    const double eps = 0.01 + 0.3 * rng.uniform01();
    const double mu = 0.5;
    // Direct evaluation of the product form.
    const double base = std::pow(mu / (mu + eps), mu + eps) *
                        std::pow((1 - mu) / (1 - mu - eps), 1 - mu - eps);
    const double want = std::pow(base, double(m));
    EXPECT_NEAR(hoeffding_exact_confidence(m, eps, mu), want,
                1e-12 + 1e-9 * want);
  }
}

TEST(HoeffdingExactTest, Preconditions) {
  EXPECT_THROW(hoeffding_exact_confidence(0, 0.1, 0.5), DomainError);
  EXPECT_THROW(hoeffding_exact_confidence(10, 0.5, 0.5), DomainError);
  EXPECT_THROW(hoeffding_exact_confidence(10, 0.1, 0.0), DomainError);
}

TEST(BoundsPropertyTest, ChainedInequality) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t m = 1 + rng.uniform_index(50000);
    const double mu = 0.001 + 0.99 * rng.uniform01();
    const double eps = (1.0 - mu) * (0.001 + 0.99 * rng.uniform01());
    if (!(mu + eps < 1.0)) continue;
    ASSERT_LE(hoeffding_exact_confidence(m, eps, mu),
              hoeffding_confidence(m, eps) * (1 + 1e-12))
        << m << ' ' << eps << ' ' << mu;
  }
}

TEST(SerflingTest, ReferenceSampleSize) {
  EXPECT_NEAR(serfling_confidence(18716, 0.01, 100000, 1), 0.01, 1e-4);
  const auto m = sample_size_serfling(0.01, 0.01, 100000, 1);
  EXPECT_GE(m, 18716u);
  EXPECT_LE(m, 18717u);
  // Exact crossing: f(18716) = 0.0100014 > 0.01 >= f(18717) = 0.0099984.
  EXPECT_EQ(m, 18717u);
  EXPECT_LT(m, sample_size_hoeffding(0.01, 0.01));
}

TEST(SerflingTest, SingleSample) {
  EXPECT_DOUBLE_EQ(serfling_confidence(1, 0.2, 1000, 1.0),
                   std::exp(-2 * 0.2 * 0.2));
  EXPECT_DOUBLE_EQ(serfling_confidence(1, 0.2, 1000, 2.0),
                   std::exp(-2 * 0.2 * 0.2 / 4));
}

TEST(SerflingTest, Errors) {
  EXPECT_THROW(serfling_confidence(11, 0.1, 10), DomainError);
  EXPECT_THROW(serfling_confidence(0, 0.1, 10), DomainError);
  EXPECT_THROW(serfling_confidence(5, 0.1, 10, 0.0), DomainError);
  // Even m = N cannot reach this delta.
  EXPECT_THROW(sample_size_serfling(0.001, 1e-9, 10), InfeasibleError);
}

TEST(SerflingTest, SampleSizeMinimality) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double eps = 0.005 + 0.1 * rng.uniform01();
    const double delta = 0.001 + 0.3 * rng.uniform01();
    const std::uint64_t n = 1000 + rng.uniform_index(200000);
    std::uint64_t m = 0;
    try {
      m = sample_size_serfling(eps, delta, n);
    } catch (const InfeasibleError&) {
      EXPECT_GT(serfling_confidence(n, eps, n), delta);
      continue;
    }
    EXPECT_LE(serfling_confidence(m, eps, n), delta);
    if (m > 1) {
      EXPECT_GT(serfling_confidence(m - 1, eps, n), delta);
    }
    if (m < n) {
      EXPECT_LE(m, sample_size_hoeffding(eps, delta));
    }
  }
}

TEST(BoundsPropertyTest, SerflingDominatesHoeffding) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t n = 2 + rng.uniform_index(1000000);
    const std::uint64_t m = 2 + rng.uniform_index(n - 1);
    const double eps = 1e-4 + 0.5 * rng.uniform01();
    ASSERT_LE(serfling_confidence(m, eps, n, 1.0), hoeffding_confidence(m, eps));
  }
}

TEST(BoundsPropertyTest, StrictlyDecreasing) {
  const std::uint64_t n = 100000;
  for (std::uint64_t m = 1; m < 3000; m += 37) {
    EXPECT_GT(hoeffding_confidence(m, 0.02), hoeffding_confidence(m + 1, 0.02));
    EXPECT_GT(hoeffding_confidence(m, 0.02), hoeffding_confidence(m, 0.021));
    EXPECT_GT(serfling_confidence(m, 0.02, n), serfling_confidence(m + 1, 0.02, n));
    EXPECT_GT(serfling_confidence(m, 0.02, n), serfling_confidence(m, 0.021, n));
    EXPECT_GT(hoeffding_exact_confidence(m, 0.02, 0.3),
              hoeffding_exact_confidence(m + 1, 0.02, 0.3));
    EXPECT_GT(hoeffding_exact_confidence(m, 0.02, 0.3),
              hoeffding_exact_confidence(m, 0.021, 0.3));
  }
}

TEST(ScaleUpTest, Examples) {
  EXPECT_DOUBLE_EQ(scale_up_estimate(50, 1000, 100000), 5000.0);
  EXPECT_DOUBLE_EQ(scale_up_estimate(0, 1000, 100000), 0.0);
  EXPECT_DOUBLE_EQ(scale_up_estimate(1000, 1000, 100000), 100000.0);
  EXPECT_THROW(scale_up_estimate(1, 0, 10), DomainError);
  EXPECT_THROW(scale_up_estimate(5, 4, 10), DomainError);
}

TEST(RelativeErrorTest, Examples) {
  EXPECT_DOUBLE_EQ(absolute_to_relative_error(1000, 100000), 0.01);
  EXPECT_DOUBLE_EQ(absolute_to_relative_error(0, 100000), 0.0);
  EXPECT_DOUBLE_EQ(absolute_to_relative_error(123, 1000) * 1000, 123.0);
  EXPECT_THROW(absolute_to_relative_error(-1, 10), DomainError);
}

TEST(TwoSidedTest, UnionBound) {
  EXPECT_DOUBLE_EQ(two_sided(0.01), 0.02);
  EXPECT_DOUBLE_EQ(two_sided(0.7), 1.0);
  EXPECT_DOUBLE_EQ(one_sided_delta(0.02), 0.01);
  EXPECT_EQ(sample_size_hoeffding(0.01, one_sided_delta(0.02)), 23026u);
}

TEST(BoundsPropertyTest, EmpiricalFailureRateWithinBounds) {
  const std::uint64_t n = 10000;
  auto ds = generate_synthetic(SyntheticSpec::uniform(n, 1, 0.3, 17));
  const double p = predicate_ratio(ds[0], LabelPredicate{});
  const BoundPredicate pred(ds[0], LabelPredicate{});
  const int trials = 1000;
  for (double eps : {0.03, 0.04, 0.05}) {
    int upper = 0, lower = 0;
    // Conditioning on the realized bucket size m, the failure probability
    // is at most bound(m); unconditionally it is at most the mean bound.
    double h = 0, s = 0;
    Rng rng(18);
    for (int t = 0; t < trials; ++t) {
      auto spec = make_sample_spec(n, 1000, rng);
      auto rows = bucket_rows(ds[0], spec);
      ASSERT_FALSE(rows.empty());
      std::size_t hits = 0;
      for (auto row : rows) hits += pred(ds[0][row]);
      const double ratio = double(hits) / double(rows.size());
      upper += ratio - p >= eps;
      lower += p - ratio >= eps;
      h += hoeffding_confidence(rows.size(), eps) / trials;
      s += serfling_confidence(rows.size(), eps, n) / trials;
    }
    EXPECT_LE(double(upper) / trials, s) << eps;
    EXPECT_LE(double(lower) / trials, s) << eps;
    EXPECT_LE(double(upper) / trials, h) << eps;
    EXPECT_LE(double(lower) / trials, h) << eps;
  }
}

}  // namespace
}  // namespace vpjoin::bounds
