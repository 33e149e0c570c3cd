// Copyright 2026 The Audiodist Authors. All Rights Reserved.
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

#include "audiodist/random.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace audiodist {
namespace {

// Upper 0.001 quantile of chi-square with 11 degrees of freedom.
constexpr double kChiSquare11At001 = 31.264;

double PoissonPmf(int k, double lambda) {
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

TEST(RandomTest, StreamsAreDeterministicAndDistinct) {
  Rng a = MakeStream(7, 3);
  Rng b = MakeStream(7, 3);
  Rng c = MakeStream(7, 4);
  Rng d = MakeStream(8, 3);
  const auto va = a(), vb = b(), vc = c(), vd = d();
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
}

TEST(RandomTest, UniformRanges) {
  Rng rng = MakeStream(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = Uniform01(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double l = LogUniform(rng, 200.0, 8000.0);
    EXPECT_GE(l, 200.0);
    EXPECT_LE(l, 8000.0);
    EXPECT_LT(UniformBelow(rng, 7), 7u);
  }
  EXPECT_EQ(LogUniform(rng, 440.0, 440.0), 440.0);
}

TEST(RandomTest, LogUniformIsUniformInLog) {
  Rng rng = MakeStream(2);
  int below_geometric_mid = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    if (LogUniform(rng, 1.0, 100.0) < 10.0) ++below_geometric_mid;
  }
  EXPECT_NEAR(below_geometric_mid / static_cast<double>(n), 0.5, 0.015);
}

TEST(RandomTest, PoissonMomentsAndGoodnessOfFit) {
  const double lambda = 4.0;
  const int draws = 10000;
  std::vector<int> counts(12, 0);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    Rng rng = MakeStream(2024, static_cast<uint64_t>(i));
    const int64_t k = Poisson(rng, lambda);
    sum += k;
    sum_sq += static_cast<double>(k * k);
    ++counts[std::min<int64_t>(k, 11)];
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  EXPECT_GE(mean, 3.9);
  EXPECT_LE(mean, 4.1);
  EXPECT_GE(var, 3.7);
  EXPECT_LE(var, 4.3);

  double chi2 = 0.0, tail = 1.0;
  for (int k = 0; k < 12; ++k) {
    const double p = k < 11 ? PoissonPmf(k, lambda) : tail;
    tail -= p;
    const double expected = p * draws;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  EXPECT_LT(chi2, kChiSquare11At001);
}

TEST(RandomTest, PoissonLargeMeanAndZero) {
  Rng rng = MakeStream(3);
  EXPECT_EQ(Poisson(rng, 0.0), 0);
  double sum = 0.0;
  for (int i = 0; i < 4000; ++i) sum += static_cast<double>(Poisson(rng, 50.0));
  EXPECT_NEAR(sum / 4000.0, 50.0, 0.5);
}

TEST(RandomTest, SampleWithoutReplacementIsDistinct) {
  Rng rng = MakeStream(4);
  const std::vector<size_t> s = SampleWithoutReplacement(rng, 100, 40);
  EXPECT_EQ(s.size(), 40u);
  EXPECT_EQ(std::set<size_t>(s.begin(), s.end()).size(), 40u);
  EXPECT_LT(*std::max_element(s.begin(), s.end()), 100u);
}

TEST(RandomTest, ShuffleIsAPermutation) {
  Rng rng = MakeStream(5);
  std::vector<int> v = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Shuffle(rng, std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

}  // namespace
}  // namespace audiodist
