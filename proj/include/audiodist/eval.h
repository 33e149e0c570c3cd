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

#ifndef AUDIODIST_EVAL_H_
#define AUDIODIST_EVAL_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "audiodist/distance.h"
#include <nlohmann/json.hpp>

namespace audiodist {

enum class ContentClass { kSpeech, kMusic, kMixed };

struct EvalItem {
  std::string item_id;
  ContentClass content_class = ContentClass::kMusic;
};

struct EvalCondition {
  std::string condition_id;
  std::string codec_label;
  double bitrate_kbps = 0.0;
  bool is_lowpass_anchor = false;
  bool is_hidden_reference = false;
};

struct EvalPair {
  std::string item_id;
  std::string condition_id;
  std::filesystem::path ref_embedding_path;
  std::filesystem::path test_embedding_path;
  // Absent in a skeleton manifest until scores are merged in.
  std::optional<double> mushra_score;
};

// Items x conditions of one listening test, plus the embedding files of
// every scored (item, condition) pair. One manifest covers one embedding
// domain, named by embedding_label.
struct EvalManifest {
  std::string embedding_label = "default";
  std::vector<EvalItem> items;
  std::vector<EvalCondition> conditions;
  std::vector<EvalPair> pairs;

  // Checks unique ids and pairs, known item/condition references and scores
  // in [0, 100]. Throws ValidationError. Embedding files are not touched
  // here; a missing file fails only its own pair during RunEval.
  void Validate(bool require_scores = true) const;
  const EvalCondition& Condition(std::string_view condition_id) const;
};

// Relative embedding paths are resolved against base_dir.
EvalManifest ManifestFromJson(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
nlohmann::json ManifestToJson(const EvalManifest& m);
// Parses and validates; scores are required unless `skeleton`.
EvalManifest LoadManifest(const std::filesystem::path& path, bool skeleton = false);

// Merges a CSV with header `item_id,condition_id,score` into the manifest's
// pairs. Throws ValidationError for rows naming unknown pairs.
void MergeScoresCsv(EvalManifest& m, const std::filesystem::path& csv_path);

struct MetricSpec {
  std::string label;
  Metric metric = Metric::kFad;
  RbfKernelConfig kernel;
  FadInfinityConfig fad_infinity;
  FrechetOptions frechet;

  static MetricSpec Fad();
  static MetricSpec FadInfinity();
  // Median-heuristic bandwidth.
  static MetricSpec MmdMedian(double alpha = 1000.0);
  static MetricSpec MmdFixed(double sigma, double alpha = 1000.0);
};

// Accepts "fad", "fad_infinity" (or "fad-inf"), "mmd" (median heuristic),
// "mmd_median" and "mmd_sigma_<value>". Throws ConfigError.
MetricSpec ParseMetricSpec(std::string_view name);

DistanceResult ComputeDistance(const MetricSpec& spec, const EmbeddingSet& ref,
                               const EmbeddingSet& test);

enum class EvalFilter { kAll, kWithoutLowpass };
enum class Pooling { kPooled, kPerCondition };

std::string_view EvalFilterName(EvalFilter f);
std::string_view PoolingName(Pooling p);

struct EvalOptions {
  bool include_hidden_reference = false;
  Pooling pooling = Pooling::kPooled;
  // RunEval throws TooManyFailuresError when a metric fails on a larger
  // share of pairs than this.
  double max_failure_fraction = 0.10;
};

struct CorrelationRow {
  std::string metric;
  std::string embedding_label;
  EvalFilter filter = EvalFilter::kAll;
  int n_points = 0;
  // Signed: a good distance anticorrelates with MUSHRA, so these are
  // expected to be negative. The abs_ fields are for table comparison.
  double r_pearson = 0.0;
  double r_spearman = 0.0;
  double abs_r_pearson = 0.0;
  double abs_r_spearman = 0.0;

  bool operator==(const CorrelationRow&) const = default;
};

struct PairDistance {
  std::string item_id;
  std::string condition_id;
  std::string metric;
  std::string embedding_label;
  std::optional<double> distance;
  std::optional<double> sigma_used;
  double mushra_score = 0.0;
  bool is_lowpass_anchor = false;
  bool is_hidden_reference = false;
  // Non-empty when the pair was skipped.
  std::string error;

  bool operator==(const PairDistance&) const = default;
};

struct CorrelationReport {
  Pooling pooling = Pooling::kPooled;
  bool include_hidden_reference = false;
  std::vector<CorrelationRow> rows;
  std::vector<PairDistance> pairs;

  // Pairs entering the correlation for (metric, label, filter).
  std::vector<const PairDistance*> SurvivingPairs(std::string_view metric,
                                                  std::string_view label,
                                                  EvalFilter filter) const;
  bool operator==(const CorrelationReport&) const = default;
};

// Scores every pair under every metric and correlates distances with MUSHRA
// scores, once over all conditions and once without lowpass anchors.
// Failing pairs are recorded and skipped.
CorrelationReport RunEval(const EvalManifest& m,
                          const std::vector<MetricSpec>& metrics,
                          const EvalOptions& options = {});

// Concatenates reports of several manifests (embedding domains).
CorrelationReport MergeReports(const std::vector<CorrelationReport>& reports);

enum class ReportFormat { kJson, kCsv, kSvgScatter };

nlohmann::json ReportToJson(const CorrelationReport& r);
CorrelationReport ReportFromJson(const nlohmann::json& j);
std::string ReportToCsv(const CorrelationReport& r);
// Distance vs MUSHRA scatter of the surviving pairs (all conditions) for one
// metric and embedding label, with the least-squares trend of score on
// distance rank.
std::string ReportToSvg(const CorrelationReport& r, std::string_view metric,
                        std::string_view embedding_label);

// Writes report.json, report.csv or one scatter_<label>_<metric>.svg per
// metric and label into out_dir. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> EmitReport(const CorrelationReport& r,
                                              ReportFormat format,
                                              const std::filesystem::path& out_dir);

}  // namespace audiodist

#endif  // AUDIODIST_EVAL_H_
