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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "audiodist/cli.h"
#include "audiodist/correlation.h"
#include "audiodist/error.h"
#include "audiodist/parallel.h"

namespace audiodist {

namespace {

using nlohmann::json;


ContentClass ParseContentClass(const std::string& s) {
  if (s == "speech") return ContentClass::kSpeech;
  if (s == "music") return ContentClass::kMusic;
  if (s == "mixed") return ContentClass::kMixed;
  throw ValidationError("unknown content_class '" + s + "'");
}

std::string_view ContentClassName(ContentClass c) {
  switch (c) {
    case ContentClass::kSpeech:
      return "speech";
    case ContentClass::kMusic:
      return "music";
    case ContentClass::kMixed:
      return "mixed";
  }
  return "music";
}

EvalFilter ParseFilter(const std::string& s) {
  if (s == "all") return EvalFilter::kAll;
  if (s == "without_lowpass") return EvalFilter::kWithoutLowpass;
  throw FormatError("unknown filter '" + s + "'");
}

Pooling ParsePooling(const std::string& s) {
  if (s == "pooled") return Pooling::kPooled;
  if (s == "per_condition") return Pooling::kPerCondition;
  throw FormatError("unknown pooling '" + s + "'");
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string FormatFixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

json OptionalToJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> OptionalFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string SanitizeForFilename(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Points of one correlation: (distance, score) per surviving pair, or per
// condition means when pooling per condition.
void CollectPoints(const std::vector<const PairDistance*>& pairs, Pooling pooling,
                   std::vector<double>& distances, std::vector<double>& scores) {
  distances.clear();
  scores.clear();
  if (pooling == Pooling::kPooled) {
    for (const PairDistance* p : pairs) {
      distances.push_back(*p->distance);
      scores.push_back(p->mushra_score);
    }
    return;
  }
  std::map<std::string, std::pair<std::pair<double, double>, int>> groups;
  for (const PairDistance* p : pairs) {
    auto& g = groups[p->condition_id];
    g.first.first += *p->distance;
    g.first.second += p->mushra_score;
    ++g.second;
  }
  for (const auto& [id, g] : groups) {
    distances.push_back(g.first.first / g.second);
    scores.push_back(g.first.second / g.second);
  }
}

std::string MetricLabelForSigma(double sigma) {
  std::string s = FormatNumber(sigma);
  return "mmd_sigma_" + s;
}

}  // namespace

void EvalManifest::Validate(bool require_scores) const {
  std::set<std::string> item_ids;
  for (const auto& item : items) {
    if (!item_ids.insert(item.item_id).second) {
      throw ValidationError("duplicate item_id '" + item.item_id + "'");
    }
  }
  std::set<std::string> condition_ids;
  for (const auto& c : conditions) {
    if (!condition_ids.insert(c.condition_id).second) {
      throw ValidationError("duplicate condition_id '" + c.condition_id + "'");
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : pairs) {
    if (!item_ids.count(p.item_id)) {
      throw ValidationError("pair references unknown item '" + p.item_id + "'");
    }
    if (!condition_ids.count(p.condition_id)) {
      throw ValidationError("pair references unknown condition '" +
                            p.condition_id + "'");
    }
    if (!seen.emplace(p.item_id, p.condition_id).second) {
      throw ValidationError("duplicate pair (" + p.item_id + ", " +
                            p.condition_id + ")");
    }
    if (p.mushra_score) {
      if (!(*p.mushra_score >= 0.0 && *p.mushra_score <= 100.0)) {
        throw ValidationError("MUSHRA score out of [0, 100] for (" + p.item_id +
                              ", " + p.condition_id + ")");
      }
    } else if (require_scores) {
      throw ValidationError("pair (" + p.item_id + ", " + p.condition_id +
                            ") has no MUSHRA score");
    }
  }
}

const EvalCondition& EvalManifest::Condition(std::string_view condition_id) const {
  for (const auto& c : conditions) {
    if (c.condition_id == condition_id) return c;
  }
  throw ValidationError("unknown condition '" + std::string(condition_id) + "'");
}

EvalManifest ManifestFromJson(const json& j, const std::filesystem::path& base_dir) {
  EvalManifest m;
  try {
    m.embedding_label = j.value("embedding_label", std::string("default"));
    for (const auto& ji : j.at("items")) {
      m.items.push_back({ji.at("item_id").get<std::string>(),
                         ParseContentClass(ji.at("content_class").get<std::string>())});
    }
    for (const auto& jc : j.at("conditions")) {
      EvalCondition c;
      c.condition_id = jc.at("condition_id").get<std::string>();
      c.codec_label = jc.value("codec_label", std::string());
      c.bitrate_kbps = jc.value("bitrate_kbps", 0.0);
      c.is_lowpass_anchor = jc.value("is_lowpass_anchor", false);
      c.is_hidden_reference = jc.value("is_hidden_reference", false);
      m.conditions.push_back(std::move(c));
    }
    for (const auto& jp : j.at("pairs")) {
      EvalPair p;
      p.item_id = jp.at("item_id").get<std::string>();
      p.condition_id = jp.at("condition_id").get<std::string>();
      std::filesystem::path ref = jp.at("ref_embedding_path").get<std::string>();
      std::filesystem::path test = jp.at("test_embedding_path").get<std::string>();
      p.ref_embedding_path = ref.is_absolute() ? ref : base_dir / ref;
      p.test_embedding_path = test.is_absolute() ? test : base_dir / test;
      if (jp.contains("mushra_score") && !jp["mushra_score"].is_null()) {
        p.mushra_score = jp["mushra_score"].get<double>();
      }
      m.pairs.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

json ManifestToJson(const EvalManifest& m) {
  json j;
  j["embedding_label"] = m.embedding_label;
  j["items"] = json::array();
  for (const auto& i : m.items) {
    j["items"].push_back(
        {{"item_id", i.item_id}, {"content_class", ContentClassName(i.content_class)}});
  }
  j["conditions"] = json::array();
  for (const auto& c : m.conditions) {
    j["conditions"].push_back({{"condition_id", c.condition_id},
                               {"codec_label", c.codec_label},
                               {"bitrate_kbps", c.bitrate_kbps},
                               {"is_lowpass_anchor", c.is_lowpass_anchor},
                               {"is_hidden_reference", c.is_hidden_reference}});
  }
  j["pairs"] = json::array();
  for (const auto& p : m.pairs) {
    j["pairs"].push_back({{"item_id", p.item_id},
                          {"condition_id", p.condition_id},
                          {"ref_embedding_path", p.ref_embedding_path.string()},
                          {"test_embedding_path", p.test_embedding_path.string()},
                          {"mushra_score", OptionalToJson(p.mushra_score)}});
  }
  return j;
}

EvalManifest LoadManifest(const std::filesystem::path& path, bool skeleton) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  EvalManifest m = ManifestFromJson(j, path.parent_path());
  m.Validate(!skeleton);
  return m;
}

void MergeScoresCsv(EvalManifest& m, const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open scores " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty scores CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "item_id,condition_id,score") {
    throw FormatError("scores CSV header must be 'item_id,condition_id,score'");
  }
  std::map<std::pair<std::string, std::string>, EvalPair*> index;
  for (auto& p : m.pairs) index[{p.item_id, p.condition_id}] = &p;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string item, condition, score_text;
    if (!std::getline(ss, item, ',') || !std::getline(ss, condition, ',') ||
        !std::getline(ss, score_text)) {
      throw FormatError("scores CSV line " + std::to_string(line_no) +
                        " needs 3 columns");
    }
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(
        score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size()) {
      throw FormatError("bad score '" + score_text + "' on line " +
                        std::to_string(line_no));
    }
    auto it = index.find({item, condition});
    if (it == index.end()) {
      throw ValidationError("scores CSV names unknown pair (" + item + ", " +
                            condition + ")");
    }
    it->second->mushra_score = score;
  }
  m.Validate(false);
}

MetricSpec MetricSpec::Fad() {
  MetricSpec s;
  s.label = "fad";
  s.metric = Metric::kFad;
  return s;
}

MetricSpec MetricSpec::FadInfinity() {
  MetricSpec s;
  s.label = "fad_infinity";
  s.metric = Metric::kFadInfinity;
  return s;
}

MetricSpec MetricSpec::MmdMedian(double alpha) {
  MetricSpec s;
  s.label = "mmd_median";
  s.metric = Metric::kMmdScaled;
  s.kernel.bandwidth_mode = BandwidthMode::kMedianHeuristic;
  s.kernel.alpha = alpha;
  return s;
}

MetricSpec MetricSpec::MmdFixed(double sigma, double alpha) {
  MetricSpec s;
  s.label = MetricLabelForSigma(sigma);
  s.metric = Metric::kMmdScaled;
  s.kernel.bandwidth_mode = BandwidthMode::kFixed;
  s.kernel.sigma = sigma;
  s.kernel.alpha = alpha;
  return s;
}

MetricSpec ParseMetricSpec(std::string_view name) {
  if (name == "fad") return MetricSpec::Fad();
  if (name == "fad_infinity" || name == "fad-inf") return MetricSpec::FadInfinity();
  if (name == "mmd" || name == "mmd_median") return MetricSpec::MmdMedian();
  constexpr std::string_view kSigmaPrefix = "mmd_sigma_";
  if (name.starts_with(kSigmaPrefix)) {
    const std::string_view value = name.substr(kSigmaPrefix.size());
    double sigma = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), sigma);
    if (ec == std::errc() && ptr == value.data() + value.size() && sigma > 0.0) {
      return MetricSpec::MmdFixed(sigma);
    }
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

DistanceResult ComputeDistance(const MetricSpec& spec, const EmbeddingSet& ref,
                               const EmbeddingSet& test) {
  switch (spec.metric) {
    case Metric::kFad:
      return Fad(ref, test, spec.frechet);
    case Metric::kFadInfinity: {
      FadInfinityConfig c = spec.fad_infinity;
      c.frechet = spec.frechet;
      return FadInfinity(ref, test, c);
    }
    case Metric::kMmdScaled:
      return MmdScaled(ref, test, spec.kernel);
  }
  throw ConfigError("unknown metric");
}

std::string_view EvalFilterName(EvalFilter f) {
  return f == EvalFilter::kAll ? "all" : "without_lowpass";
}

std::string_view PoolingName(Pooling p) {
  return p == Pooling::kPooled ? "pooled" : "per_condition";
}

std::vector<const PairDistance*> CorrelationReport::SurvivingPairs(
    std::string_view metric, std::string_view label, EvalFilter filter) const {
  std::vector<const PairDistance*> out;
  for (const auto& p : pairs) {
    if (p.metric != metric || p.embedding_label != label) continue;
    if (!p.distance) continue;
    if (p.is_hidden_reference && !include_hidden_reference) continue;
    if (filter == EvalFilter::kWithoutLowpass && p.is_lowpass_anchor) continue;
    out.push_back(&p);
  }
  return out;
}

CorrelationReport RunEval(const EvalManifest& m,
                          const std::vector<MetricSpec>& metrics,
                          const EvalOptions& options) {
  m.Validate(true);
  if (metrics.empty()) throw ConfigError("no metrics requested");

  // Load every referenced file once.
  std::vector<std::filesystem::path> paths;
  for (const auto& p : m.pairs) {
    paths.push_back(p.ref_embedding_path);
    paths.push_back(p.test_embedding_path);
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  std::vector<std::optional<EmbeddingSet>> sets(paths.size());
  std::vector<std::string> load_errors(paths.size());
  ParallelFor(paths.size(), [&](size_t i) {
    try {
      sets[i].emplace(LoadEmbeddings(paths[i]));
    } catch (const Error& e) {
      load_errors[i] = e.what();
    }
  });

  // Files whose dim disagrees with the label's dominant dim fail their pairs.
  std::map<Eigen::Index, int> dim_counts;
  for (const auto& s : sets) {
    if (s) ++dim_counts[s->dim()];
  }
  Eigen::Index expected_dim = 0;
  int best = 0;
  for (const auto& [dim, count] : dim_counts) {
    if (count > best) {
      best = count;
      expected_dim = dim;
    }
  }
  for (size_t i = 0; i < sets.size(); ++i) {
    if (sets[i] && sets[i]->dim() != expected_dim) {
      load_errors[i] = paths[i].string() + ": embedding dim " +
                       std::to_string(sets[i]->dim()) + " != " +
                       std::to_string(expected_dim) + " used by '" +
                       m.embedding_label + "'";
      sets[i].reset();
    }
  }
  auto lookup = [&](const std::filesystem::path& p) {
    return static_cast<size_t>(
        std::lower_bound(paths.begin(), paths.end(), p) - paths.begin());
  };

  const size_t n_pairs = m.pairs.size();
  CorrelationReport report;
  report.pooling = options.pooling;
  report.include_hidden_reference = options.include_hidden_reference;
  report.pairs.resize(metrics.size() * n_pairs);
  ParallelFor(report.pairs.size(), [&](size_t task) {
    const MetricSpec& spec = metrics[task / n_pairs];
    const EvalPair& pair = m.pairs[task % n_pairs];
    const EvalCondition& condition = m.Condition(pair.condition_id);
    PairDistance& out = report.pairs[task];
    out.item_id = pair.item_id;
    out.condition_id = pair.condition_id;
    out.metric = spec.label;
    out.embedding_label = m.embedding_label;
    out.mushra_score = *pair.mushra_score;
    out.is_lowpass_anchor = condition.is_lowpass_anchor;
    out.is_hidden_reference = condition.is_hidden_reference;
    const size_t ri = lookup(pair.ref_embedding_path);
    const size_t ti = lookup(pair.test_embedding_path);
    if (!sets[ri]) {
      out.error = load_errors[ri];
      return;
    }
    if (!sets[ti]) {
      out.error = load_errors[ti];
      return;
    }
    try {
      const DistanceResult d = ComputeDistance(spec, *sets[ri], *sets[ti]);
      out.distance = d.value;
      out.sigma_used = d.sigma_used;
    } catch (const Error& e) {
      out.error = e.what();
    }
  });

  for (size_t k = 0; k < metrics.size(); ++k) {
    size_t failed = 0;
    std::string first_error;
    for (size_t i = 0; i < n_pairs; ++i) {
      const auto& p = report.pairs[k * n_pairs + i];
      if (!p.error.empty()) {
        if (failed++ == 0) first_error = p.error;
      }
    }
    if (static_cast<double>(failed) >
        options.max_failure_fraction * static_cast<double>(n_pairs)) {
      throw TooManyFailuresError(
          std::to_string(failed) + " of " + std::to_string(n_pairs) +
          " pairs failed for metric '" + metrics[k].label +
          "' (first: " + first_error + ")");
    }
  }

  std::vector<double> distances;
  std::vector<double> scores;
  for (const auto& spec : metrics) {
    for (EvalFilter filter : {EvalFilter::kAll, EvalFilter::kWithoutLowpass}) {
      CollectPoints(report.SurvivingPairs(spec.label, m.embedding_label, filter),
                    options.pooling, distances, scores);
      CorrelationRow row;
      row.metric = spec.label;
      row.embedding_label = m.embedding_label;
      row.filter = filter;
      row.n_points = static_cast<int>(distances.size());
      row.r_pearson = Pearson(distances, scores);
      row.r_spearman = Spearman(distances, scores);
      row.abs_r_pearson = std::abs(row.r_pearson);
      row.abs_r_spearman = std::abs(row.r_spearman);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

CorrelationReport MergeReports(const std::vector<CorrelationReport>& reports) {
  CorrelationReport out;
  if (reports.empty()) return out;
  out.pooling = reports.front().pooling;
  out.include_hidden_reference = reports.front().include_hidden_reference;
  for (const auto& r : reports) {
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.pairs.insert(out.pairs.end(), r.pairs.begin(), r.pairs.end());
  }
  return out;
}

json ReportToJson(const CorrelationReport& r) {
  json j;
  j["format_version"] = kReportFormatVersion;
  j["pooling"] = PoolingName(r.pooling);
  j["include_hidden_reference"] = r.include_hidden_reference;
  j["correlations"] = json::array();
  for (const auto& row : r.rows) {
    j["correlations"].push_back({{"metric", row.metric},
                                 {"embedding_label", row.embedding_label},
                                 {"filter", EvalFilterName(row.filter)},
                                 {"n_points", row.n_points},
                                 {"r_pearson", row.r_pearson},
                                 {"r_spearman", row.r_spearman},
                                 {"abs_r_pearson", row.abs_r_pearson},
                                 {"abs_r_spearman", row.abs_r_spearman}});
  }
  j["pairs"] = json::array();
  for (const auto& p : r.pairs) {
    j["pairs"].push_back({{"item_id", p.item_id},
                          {"condition_id", p.condition_id},
                          {"metric", p.metric},
                          {"embedding_label", p.embedding_label},
                          {"distance", OptionalToJson(p.distance)},
                          {"sigma_used", OptionalToJson(p.sigma_used)},
                          {"mushra_score", p.mushra_score},
                          {"is_lowpass_anchor", p.is_lowpass_anchor},
                          {"is_hidden_reference", p.is_hidden_reference},
                          {"error", p.error}});
  }
  return j;
}

CorrelationReport ReportFromJson(const json& j) {
  CorrelationReport r;
  try {
    r.pooling = ParsePooling(j.at("pooling").get<std::string>());
    r.include_hidden_reference = j.at("include_hidden_reference").get<bool>();
    for (const auto& jr : j.at("correlations")) {
      CorrelationRow row;
      row.metric = jr.at("metric").get<std::string>();
      row.embedding_label = jr.at("embedding_label").get<std::string>();
      row.filter = ParseFilter(jr.at("filter").get<std::string>());
      row.n_points = jr.at("n_points").get<int>();
      row.r_pearson = jr.at("r_pearson").get<double>();
      row.r_spearman = jr.at("r_spearman").get<double>();
      row.abs_r_pearson = jr.at("abs_r_pearson").get<double>();
      row.abs_r_spearman = jr.at("abs_r_spearman").get<double>();
      r.rows.push_back(std::move(row));
    }
    for (const auto& jp : j.at("pairs")) {
      PairDistance p;
      p.item_id = jp.at("item_id").get<std::string>();
      p.condition_id = jp.at("condition_id").get<std::string>();
      p.metric = jp.at("metric").get<std::string>();
      p.embedding_label = jp.at("embedding_label").get<std::string>();
      p.distance = OptionalFromJson(jp.at("distance"));
      p.sigma_used = OptionalFromJson(jp.at("sigma_used"));
      p.mushra_score = jp.at("mushra_score").get<double>();
      p.is_lowpass_anchor = jp.at("is_lowpass_anchor").get<bool>();
      p.is_hidden_reference = jp.at("is_hidden_reference").get<bool>();
      p.error = jp.at("error").get<std::string>();
      r.pairs.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string ReportToCsv(const CorrelationReport& r) {
  std::string out =
      "metric,embedding_label,filter,n_points,r_pearson,r_spearman,"
      "abs_r_pearson,abs_r_spearman\n";
  for (const auto& row : r.rows) {
    out += row.metric + "," + row.embedding_label + "," +
           std::string(EvalFilterName(row.filter)) + "," +
           std::to_string(row.n_points) + "," + FormatNumber(row.r_pearson) +
           "," + FormatNumber(row.r_spearman) + "," +
           FormatNumber(row.abs_r_pearson) + "," +
           FormatNumber(row.abs_r_spearman) + "\n";
  }
  return out;
}

std::string ReportToSvg(const CorrelationReport& r, std::string_view metric,
                        std::string_view embedding_label) {
  constexpr double kWidth = 640, kHeight = 480, kLeft = 70, kRight = 20,
                   kTop = 40, kBottom = 60;
  const auto points = r.SurvivingPairs(metric, embedding_label, EvalFilter::kAll);
  double lo = 0.0, hi = 1.0;
  if (!points.empty()) {
    lo = hi = *points.front()->distance;
    for (const auto* p : points) {
      lo = std::min(lo, *p->distance);
      hi = std::max(hi, *p->distance);
    }
    if (hi == lo) hi = lo + 1.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double d) { return kLeft + (d - lo) / (hi - lo) * plot_w; };
  auto py = [&](double s) { return kTop + (1.0 - s / 100.0) * plot_h; };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
      "viewBox=\"0 0 640 480\">\n"
      "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::string title = std::string(metric) + " (" + std::string(embedding_label) + ")";
  for (const auto& row : r.rows) {
    if (row.metric == metric && row.embedding_label == embedding_label &&
        row.filter == EvalFilter::kAll) {
      title += "  Rp=" + FormatFixed(row.r_pearson, 3) +
               "  Rs=" + FormatFixed(row.r_spearman, 3);
    }
  }
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         title + "</text>\n";
  svg += "<g stroke=\"black\" fill=\"none\">\n<line x1=\"" + FormatFixed(kLeft, 1) +
         "\" y1=\"" + FormatFixed(kTop + plot_h, 1) + "\" x2=\"" +
         FormatFixed(kLeft + plot_w, 1) + "\" y2=\"" + FormatFixed(kTop + plot_h, 1) +
         "\"/>\n<line x1=\"" + FormatFixed(kLeft, 1) + "\" y1=\"" +
         FormatFixed(kTop, 1) + "\" x2=\"" + FormatFixed(kLeft, 1) + "\" y2=\"" +
         FormatFixed(kTop + plot_h, 1) + "\"/>\n</g>\n";
  svg += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-size=\"12\">"
         "distance</text>\n";
  svg += "<text x=\"16\" y=\"240\" font-size=\"12\" transform=\"rotate(-90 16 240)\" "
         "text-anchor=\"middle\">MUSHRA score</text>\n";
  svg += "<text x=\"" + FormatFixed(kLeft, 1) + "\" y=\"" +
         FormatFixed(kTop + plot_h + 16, 1) + "\" font-size=\"10\">" +
         FormatNumber(lo) + "</text>\n";
  svg += "<text x=\"" + FormatFixed(kLeft + plot_w, 1) + "\" y=\"" +
         FormatFixed(kTop + plot_h + 16, 1) +
         "\" font-size=\"10\" text-anchor=\"end\">" + FormatNumber(hi) +
         "</text>\n";

  // Trend: least-squares fit of score on distance rank, drawn at each
  // point's distance in distance order.
  if (points.size() >= 2) {
    std::vector<double> d, s;
    for (const auto* p : points) {
      d.push_back(*p->distance);
      s.push_back(p->mushra_score);
    }
    const std::vector<double> rank = FractionalRanks(d);
    double mr = 0, ms = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      mr += rank[i];
      ms += s[i];
    }
    mr /= static_cast<double>(d.size());
    ms /= static_cast<double>(d.size());
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      sxx += (rank[i] - mr) * (rank[i] - mr);
      sxy += (rank[i] - mr) * (s[i] - ms);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    std::vector<size_t> order(d.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return d[a] < d[b]; });
    svg += "<polyline class=\"trend\" fill=\"none\" stroke=\"#d62728\" points=\"";
    for (size_t k = 0; k < order.size(); ++k) {
      const size_t i = order[k];
      const double fitted = std::clamp(ms + slope * (rank[i] - mr), 0.0, 100.0);
      if (k) svg += " ";
      svg += FormatFixed(px(d[i]), 2) + "," + FormatFixed(py(fitted), 2);
    }
    svg += "\"/>\n";
  }
  for (const auto* p : points) {
    svg += "<circle class=\"point\" cx=\"" + FormatFixed(px(*p->distance), 2) +
           "\" cy=\"" + FormatFixed(py(p->mushra_score), 2) + "\" r=\"3\" fill=\"" +
           (p->is_lowpass_anchor ? "#ff7f0e" : "#1f77b4") + "\"><title>" +
           p->item_id + "/" + p->condition_id + "</title></circle>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> EmitReport(const CorrelationReport& r,
                                              ReportFormat format,
                                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  switch (format) {
    case ReportFormat::kJson: {
      const auto path = out_dir / "report.json";
      WriteText(path, ReportToJson(r).dump(2) + "\n");
      written.push_back(path);
      break;
    }
    case ReportFormat::kCsv: {
      const auto path = out_dir / "report.csv";
      WriteText(path, ReportToCsv(r));
      written.push_back(path);
      break;
    }
    case ReportFormat::kSvgScatter: {
      std::set<std::pair<std::string, std::string>> done;
      for (const auto& row : r.rows) {
        if (!done.emplace(row.embedding_label, row.metric).second) continue;
        const auto path = out_dir / ("scatter_" +
                                     SanitizeForFilename(row.embedding_label) +
                                     "_" + SanitizeForFilename(row.metric) + ".svg");
        WriteText(path, ReportToSvg(r, row.metric, row.embedding_label));
        written.push_back(path);
      }
      break;
    }
  }
  return written;
}

}  // namespace audiodist
