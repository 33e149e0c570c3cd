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

#include "audiodist/eval.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "audiodist/error.h"
#include "audiodist/npy.h"
#include "audiodist/parallel.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiodist {
namespace {

using ::audiodist::testing::TempDir;

// 1-D frames with zero mean; shifting them by sqrt(d) gives FAD d.
const std::vector<double> kBase = {-1.5, -0.5, 0.0, 0.25, 0.75, 1.0};

void WriteShifted(const std::filesystem::path& path, double shift) {
  std::vector<double> v;
  for (double b : kBase) v.push_back(b + shift);
  const std::vector<size_t> shape = {v.size(), 1};
  WriteNpy(path, v, shape, NpyDtype::kFloat64);
}

struct ToyCondition {
  std::string id;
  bool lowpass = false;
  bool hidden = false;
};

// Builds items x conditions on disk; distance_of(score) sets each test file.
EvalManifest BuildManifest(const std::filesystem::path& dir, int n_items,
                           const std::vector<ToyCondition>& conditions,
                           const std::function<double(int, int)>& score_of,
                           const std::function<double(double)>& distance_of) {
  EvalManifest m;
  m.embedding_label = "toy";
  for (const auto& c : conditions) {
    m.conditions.push_back({c.id, "codec", 32.0, c.lowpass, c.hidden});
  }
  for (int i = 0; i < n_items; ++i) {
    const std::string item = "item" + std::to_string(i);
    m.items.push_back({item, ContentClass::kMusic});
    const auto ref = dir / (item + "_ref.npy");
    WriteShifted(ref, 0.0);
    for (size_t c = 0; c < conditions.size(); ++c) {
      const double score = score_of(i, static_cast<int>(c));
      const auto test = dir / (item + "_" + conditions[c].id + ".npy");
      WriteShifted(test, std::sqrt(distance_of(score)));
      m.pairs.push_back({item, conditions[c].id, ref, test, score});
    }
  }
  return m;
}

double Score(int item, int condition) { return 10.0 + 15.0 * condition + 2.0 * item; }

const CorrelationRow& Row(const CorrelationReport& r, std::string_view metric,
                          EvalFilter filter) {
  for (const auto& row : r.rows) {
    if (row.metric == metric && row.filter == filter) return row;
  }
  throw std::runtime_error("row not found");
}

TEST(RunEvalTest, LinearDistanceGivesMinusOne) {
  const auto dir = TempDir("eval_linear");
  const EvalManifest m =
      BuildManifest(dir, 4, {{"a"}, {"b"}, {"c"}, {"lp", true}}, Score,
                    [](double s) { return 100.0 - s; });
  const CorrelationReport r = RunEval(m, {MetricSpec::Fad()});
  const auto& all = Row(r, "fad", EvalFilter::kAll);
  EXPECT_NEAR(all.r_pearson, -1.0, 1e-9);
  EXPECT_NEAR(all.abs_r_pearson, 1.0, 1e-9);
  EXPECT_NEAR(all.r_spearman, -1.0, 1e-12);
  EXPECT_EQ(all.n_points, 16);
  const auto& wo = Row(r, "fad", EvalFilter::kWithoutLowpass);
  EXPECT_EQ(wo.n_points, 12);
}

TEST(RunEvalTest, CubicDistanceIsMonotoneButNotLinear) {
  const auto dir = TempDir("eval_cubic");
  const EvalManifest m = BuildManifest(dir, 3, {{"a"}, {"b"}, {"c"}, {"d"}}, Score,
                                       [](double s) { return std::pow(100.0 - s, 3); });
  const CorrelationReport r = RunEval(m, {MetricSpec::Fad()});
  const auto& all = Row(r, "fad", EvalFilter::kAll);
  EXPECT_NEAR(all.abs_r_spearman, 1.0, 1e-12);
  EXPECT_LT(all.abs_r_pearson, 1.0 - 1e-3);
  EXPECT_LT(all.r_pearson, 0.0);
}

TEST(RunEvalTest, LowpassFilterRemovesExactlyFlaggedPairs) {
  const auto dir = TempDir("eval_lp");
  const EvalManifest m = BuildManifest(
      dir, 5, {{"a"}, {"lp35", true}, {"b"}, {"lp70", true}, {"c"}}, Score,
      [](double s) { return 100.0 - s + 1.0; });
  const CorrelationReport r = RunEval(m, {MetricSpec::Fad(), MetricSpec::MmdMedian()});
  for (const char* metric : {"fad", "mmd_median"}) {
    const auto& all = Row(r, metric, EvalFilter::kAll);
    const auto& wo = Row(r, metric, EvalFilter::kWithoutLowpass);
    EXPECT_EQ(all.n_points - wo.n_points, 10) << metric;
    for (const auto* p : r.SurvivingPairs(metric, "toy", EvalFilter::kWithoutLowpass)) {
      EXPECT_FALSE(p->is_lowpass_anchor);
    }
  }
}

TEST(RunEvalTest, HiddenReferenceExcludedByDefault) {
  const auto dir = TempDir("eval_hidden");
  const EvalManifest m =
      BuildManifest(dir, 3, {{"ref", false, true}, {"a"}, {"b"}, {"c"}},
                    [](int i, int c) { return c == 0 ? 100.0 : Score(i, c); },
                    [](double s) { return 100.0 - s + 0.5; });
  const CorrelationReport excluded = RunEval(m, {MetricSpec::Fad()});
  EXPECT_EQ(Row(excluded, "fad", EvalFilter::kAll).n_points, 9);
  EvalOptions with;
  with.include_hidden_reference = true;
  const CorrelationReport included = RunEval(m, {MetricSpec::Fad()}, with);
  EXPECT_EQ(Row(included, "fad", EvalFilter::kAll).n_points, 12);
}

TEST(RunEvalTest, PerConditionPooling) {
  const auto dir = TempDir("eval_pool");
  const EvalManifest m = BuildManifest(dir, 4, {{"a"}, {"b"}, {"c"}, {"d"}}, Score,
                                       [](double s) { return 100.0 - s; });
  EvalOptions o;
  o.pooling = Pooling::kPerCondition;
  const CorrelationReport r = RunEval(m, {MetricSpec::Fad()}, o);
  EXPECT_EQ(Row(r, "fad", EvalFilter::kAll).n_points, 4);
  EXPECT_EQ(r.pooling, Pooling::kPerCondition);
}

TEST(RunEvalTest, TwoPairsIsUndefined) {
  const auto dir = TempDir("eval_two");
  const EvalManifest m = BuildManifest(dir, 1, {{"a"}, {"b"}}, Score,
                                       [](double s) { return 100.0 - s; });
  EXPECT_THROW(RunEval(m, {MetricSpec::Fad()}), UndefinedCorrelationError);
}

TEST(RunEvalTest, MissingFileSkipsOnlyItsPair) {
  const auto dir = TempDir("eval_missing");
  EvalManifest m = BuildManifest(dir, 11, {{"a"}, {"b"}}, Score,
                                 [](double s) { return 100.0 - s; });
  m.pairs[3].test_embedding_path = dir / "nope.npy";
  const CorrelationReport r = RunEval(m, {MetricSpec::Fad()});
  EXPECT_EQ(Row(r, "fad", EvalFilter::kAll).n_points, 21);
  int skipped = 0;
  for (const auto& p : r.pairs) {
    if (!p.error.empty()) {
      ++skipped;
      EXPECT_FALSE(p.distance.has_value());
      EXPECT_NE(p.error.find("nope.npy"), std::string::npos);
    }
  }
  EXPECT_EQ(skipped, 1);
}

TEST(RunEvalTest, TooManyFailures) {
  const auto dir = TempDir("eval_fail");
  EvalManifest m = BuildManifest(dir, 5, {{"a"}, {"b"}}, Score,
                                 [](double s) { return 100.0 - s; });
  m.pairs[0].test_embedding_path = dir / "x.npy";
  m.pairs[1].test_embedding_path = dir / "y.npy";
  EXPECT_THROW(RunEval(m, {MetricSpec::Fad()}), TooManyFailuresError);
}

TEST(RunEvalTest, IndependentOfThreadsAndPairOrder) {
  const auto dir = TempDir("eval_order");
  EvalManifest m = BuildManifest(dir, 6, {{"a"}, {"b"}, {"lp", true}}, Score,
                                 [](double s) { return std::sqrt(100.0 - s); });
  const std::vector<MetricSpec> metrics = {MetricSpec::Fad(), MetricSpec::MmdMedian(),
                                           MetricSpec::MmdFixed(10.0)};
  SetMaxThreads(1);
  const CorrelationReport one = RunEval(m, metrics);
  SetMaxThreads(3);
  const CorrelationReport three = RunEval(m, metrics);
  SetMaxThreads(0);
  EXPECT_EQ(one, three);
  std::reverse(m.pairs.begin(), m.pairs.end());
  const CorrelationReport reversed = RunEval(m, metrics);
  ASSERT_EQ(reversed.rows.size(), one.rows.size());
  for (size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_NEAR(reversed.rows[i].r_pearson, one.rows[i].r_pearson, 1e-12);
    EXPECT_NEAR(reversed.rows[i].r_spearman, one.rows[i].r_spearman, 1e-12);
  }
}

TEST(ManifestTest, ValidationAndJsonRoundTrip) {
  const auto dir = TempDir("eval_manifest");
  EvalManifest m = BuildManifest(dir, 2, {{"a"}, {"b"}}, Score,
                                 [](double s) { return 100.0 - s; });
  EXPECT_NO_THROW(m.Validate());
  const EvalManifest back = ManifestFromJson(ManifestToJson(m));
  EXPECT_EQ(ManifestToJson(back), ManifestToJson(m));

  EvalManifest dup = m;
  dup.pairs.push_back(dup.pairs.front());
  EXPECT_THROW(dup.Validate(), ValidationError);
  EvalManifest bad_score = m;
  bad_score.pairs[0].mushra_score = 101.0;
  EXPECT_THROW(bad_score.Validate(), ValidationError);
  EvalManifest unknown = m;
  unknown.pairs[0].condition_id = "zzz";
  EXPECT_THROW(unknown.Validate(), ValidationError);
  EvalManifest skeleton = m;
  skeleton.pairs[0].mushra_score.reset();
  EXPECT_THROW(skeleton.Validate(), ValidationError);
  EXPECT_NO_THROW(skeleton.Validate(false));
}

TEST(ManifestTest, RelativePathsAndCsvMerge) {
  const auto dir = TempDir("eval_csv");
  EvalManifest m = BuildManifest(dir, 2, {{"a"}, {"b"}}, Score,
                                 [](double s) { return 100.0 - s; });
  nlohmann::json j = ManifestToJson(m);
  for (auto& p : j["pairs"]) {
    p["ref_embedding_path"] =
        std::filesystem::path(p["ref_embedding_path"].get<std::string>()).filename().string();
    p["test_embedding_path"] =
        std::filesystem::path(p["test_embedding_path"].get<std::string>()).filename().string();
    p["mushra_score"] = nullptr;
  }
  std::ofstream(dir / "skeleton.json") << j.dump();
  EvalManifest skeleton = LoadManifest(dir / "skeleton.json", true);
  EXPECT_EQ(skeleton.pairs[0].ref_embedding_path, dir / "item0_ref.npy");
  EXPECT_THROW(LoadManifest(dir / "skeleton.json"), ValidationError);

  std::ofstream(dir / "scores.csv")
      << "item_id,condition_id,score\nitem0,a,10\nitem0,b,40\nitem1,a,20\nitem1,b,55.5\n";
  MergeScoresCsv(skeleton, dir / "scores.csv");
  EXPECT_EQ(*skeleton.pairs[3].mushra_score, 55.5);
  EXPECT_NO_THROW(skeleton.Validate());

  std::ofstream(dir / "bad.csv") << "item_id,condition_id,score\nitem9,a,10\n";
  EXPECT_THROW(MergeScoresCsv(skeleton, dir / "bad.csv"), ValidationError);
  std::ofstream(dir / "header.csv") << "a,b,c\n";
  EXPECT_THROW(MergeScoresCsv(skeleton, dir / "header.csv"), FormatError);
}

TEST(MetricSpecTest, Parsing) {
  EXPECT_EQ(ParseMetricSpec("fad").metric, Metric::kFad);
  EXPECT_EQ(ParseMetricSpec("fad-inf").label, "fad_infinity");
  EXPECT_EQ(ParseMetricSpec("mmd").label, "mmd_median");
  const MetricSpec s = ParseMetricSpec("mmd_sigma_100");
  EXPECT_EQ(s.kernel.bandwidth_mode, BandwidthMode::kFixed);
  EXPECT_EQ(s.kernel.sigma, 100.0);
  EXPECT_EQ(s.label, "mmd_sigma_100");
  EXPECT_THROW(ParseMetricSpec("mmd_sigma_-1"), ConfigError);
  EXPECT_THROW(ParseMetricSpec("cosine"), ConfigError);
}

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = TempDir("eval_report");
    const EvalManifest m = BuildManifest(dir_, 4, {{"a"}, {"b"}, {"lp", true}}, Score,
                                         [](double s) { return 100.0 - s + 0.25; });
    report_ = RunEval(m, {MetricSpec::Fad(), MetricSpec::MmdMedian()});
  }
  std::filesystem::path dir_;
  CorrelationReport report_;
};

TEST_F(ReportTest, JsonRoundTripsAndIsDeterministic) {
  const nlohmann::json j = ReportToJson(report_);
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(j.dump())), report_);
  EXPECT_EQ(ReportToJson(report_).dump(), j.dump());
  EXPECT_EQ(j["format_version"], 1);
}

TEST_F(ReportTest, CsvRowCount) {
  const std::string csv = ReportToCsv(report_);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 * 2 + 1);
}

TEST_F(ReportTest, SvgHasOnePointPerSurvivingPair) {
  for (const char* metric : {"fad", "mmd_median"}) {
    const std::string svg = ReportToSvg(report_, metric, "toy");
    const std::regex point("class=\"point\"");
    const auto n = std::distance(std::sregex_iterator(svg.begin(), svg.end(), point),
                                 std::sregex_iterator());
    EXPECT_EQ(static_cast<size_t>(n),
              report_.SurvivingPairs(metric, "toy", EvalFilter::kAll).size());
    EXPECT_NE(svg.find("class=\"trend\""), std::string::npos);
  }
}

TEST_F(ReportTest, EmitWritesFilesAndFailsOnBadPath) {
  const auto out = dir_ / "out";
  EXPECT_EQ(EmitReport(report_, ReportFormat::kJson, out).size(), 1u);
  EXPECT_EQ(EmitReport(report_, ReportFormat::kCsv, out).size(), 1u);
  EXPECT_EQ(EmitReport(report_, ReportFormat::kSvgScatter, out).size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(out / "scatter_toy_fad.svg"));
  std::ofstream(dir_ / "file") << "x";
  EXPECT_THROW(EmitReport(report_, ReportFormat::kJson, dir_ / "file" / "sub"), IoError);
}

}  // namespace
}  // namespace audiodist
