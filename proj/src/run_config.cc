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

#include "audiodist/run_config.h"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "audiodist/error.h"

namespace audiodist {

namespace {

using nlohmann::json;

json TomlToJson(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = TomlToJson(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(TomlToJson(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("unsupported TOML value type (dates and times are not used)");
}

// Reads keys of one table and rejects any key nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : name_(std::move(name)) {
    if (!j.is_object()) throw ConfigError("'" + name_ + "' must be a table");
    j_ = &j;
  }
  ~Section() = default;

  template <typename T>
  void Read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_->contains(key)) return;
    try {
      out = (*j_)[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError("bad value for '" + Path(key) + "'");
    }
  }

  void ReadRange(const char* key, Range& out) {
    seen_.insert(key);
    if (!j_->contains(key)) return;
    const json& v = (*j_)[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError("'" + Path(key) + "' must be a [lo, hi] pair");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    return j_->contains(key) ? &(*j_)[key] : nullptr;
  }

  void Finish() const {
    for (const auto& [key, value] : j_->items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + Path(key) + "'");
    }
  }

 private:
  std::string Path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  const json* j_;
  std::string name_;
  std::set<std::string> seen_;
};

json RangeJson(const Range& r) { return json::array({r.lo, r.hi}); }

}  // namespace

void RunConfig::PropagateSeed() {
  synth.seed = seed;
  kernel.seed = seed;
  fad_infinity.seed = seed;
}

RunConfig RunConfigFromJson(const json& j) {
  RunConfig c;
  Section top(j, "");
  top.Read("subcommand", c.subcommand);
  top.Read("seed", c.seed);
  top.Read("threads", c.threads);
  std::string ignored;
  top.Read("toolkit_version", ignored);

  if (const json* s = top.Child("mel")) {
    Section mel(*s, "mel");
    mel.Read("sample_rate", c.mel.sample_rate);
    mel.Read("n_fft", c.mel.n_fft);
    mel.Read("hop", c.mel.hop);
    mel.Read("n_mels", c.mel.n_mels);
    mel.Read("f_min", c.mel.f_min);
    mel.Read("f_max", c.mel.f_max);
    mel.Read("log_floor", c.mel.log_floor);
    mel.Read("multiscale", c.mel.multiscale);
    mel.Finish();
  }
  if (const json* s = top.Child("synth")) {
    Section synth(*s, "synth");
    synth.Read("sample_rate", c.synth.sample_rate);
    synth.Read("duration", c.synth.duration);
    synth.Read("event_rate", c.synth.event_rate);
    synth.ReadRange("f_range", c.synth.f_range);
    synth.ReadRange("level_range_db", c.synth.level_range_db);
    synth.ReadRange("decay_range", c.synth.decay_range);
    synth.Read("partials_max", c.synth.partials_max);
    synth.Read("partial_rolloff_db", c.synth.partial_rolloff_db);
    synth.ReadRange("vibrato_depth_cents", c.synth.vibrato_depth_cents);
    synth.ReadRange("vibrato_rate_hz", c.synth.vibrato_rate_hz);
    synth.Finish();
  }
  if (const json* s = top.Child("kernel")) {
    Section kernel(*s, "kernel");
    std::string mode(BandwidthModeName(c.kernel.bandwidth_mode));
    kernel.Read("bandwidth_mode", mode);
    if (mode == "fixed") {
      c.kernel.bandwidth_mode = BandwidthMode::kFixed;
    } else if (mode == "median_heuristic" || mode == "median") {
      c.kernel.bandwidth_mode = BandwidthMode::kMedianHeuristic;
    } else {
      throw ConfigError("kernel.bandwidth_mode must be 'median_heuristic' or 'fixed'");
    }
    kernel.Read("sigma", c.kernel.sigma);
    kernel.Read("alpha", c.kernel.alpha);
    kernel.Read("max_frames", c.kernel.max_frames);
    kernel.Finish();
  }
  if (const json* s = top.Child("fad_infinity")) {
    Section fi(*s, "fad_infinity");
    fi.Read("subsample_sizes", c.fad_infinity.subsample_sizes);
    fi.Read("draws_per_size", c.fad_infinity.draws_per_size);
    fi.Read("default_size_count", c.fad_infinity.default_size_count);
    fi.Finish();
  }
  if (const json* s = top.Child("frechet")) {
    Section fr(*s, "frechet");
    fr.Read("ridge", c.frechet.ridge);
    fr.Finish();
  }
  if (const json* s = top.Child("eval")) {
    Section ev(*s, "eval");
    ev.Read("include_hidden_reference", c.eval.include_hidden_reference);
    std::string pooling(PoolingName(c.eval.pooling));
    ev.Read("pooling", pooling);
    if (pooling == "pooled") {
      c.eval.pooling = Pooling::kPooled;
    } else if (pooling == "per_condition") {
      c.eval.pooling = Pooling::kPerCondition;
    } else {
      throw ConfigError("eval.pooling must be 'pooled' or 'per_condition'");
    }
    ev.Read("max_failure_fraction", c.eval.max_failure_fraction);
    ev.Finish();
  }
  if (const json* s = top.Child("batch")) {
    Section b(*s, "batch");
    b.Read("batch_size", c.batch.batch_size);
    b.Read("tonal_fraction", c.batch.tonal_fraction);
    b.Read("num_batches", c.batch.num_batches);
    b.Finish();
  }
  if (const json* s = top.Child("params")) c.params = *s;
  top.Finish();
  c.PropagateSeed();
  return c;
}

RunConfig ParseRunConfigToml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at " << e.source().begin;
    throw ConfigError(msg.str());
  }
  return RunConfigFromJson(TomlToJson(table));
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return RunConfigFromJson(json::parse(buffer.str()));
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return ParseRunConfigToml(buffer.str());
}

json RunConfigToJson(const RunConfig& c) {
  json j;
  j["toolkit_version"] = AUDIODIST_VERSION;
  j["subcommand"] = c.subcommand;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["mel"] = {{"sample_rate", c.mel.sample_rate},
              {"n_fft", c.mel.n_fft},
              {"hop", c.mel.hop},
              {"n_mels", c.mel.n_mels},
              {"f_min", c.mel.f_min},
              {"f_max", c.mel.f_max},
              {"log_floor", c.mel.log_floor},
              {"multiscale", c.mel.multiscale}};
  j["synth"] = {{"sample_rate", c.synth.sample_rate},
                {"duration", c.synth.duration},
                {"event_rate", c.synth.event_rate},
                {"f_range", RangeJson(c.synth.f_range)},
                {"level_range_db", RangeJson(c.synth.level_range_db)},
                {"decay_range", RangeJson(c.synth.decay_range)},
                {"partials_max", c.synth.partials_max},
                {"partial_rolloff_db", c.synth.partial_rolloff_db},
                {"vibrato_depth_cents", RangeJson(c.synth.vibrato_depth_cents)},
                {"vibrato_rate_hz", RangeJson(c.synth.vibrato_rate_hz)}};
  j["kernel"] = {{"bandwidth_mode", BandwidthModeName(c.kernel.bandwidth_mode)},
                 {"sigma", c.kernel.sigma},
                 {"alpha", c.kernel.alpha},
                 {"max_frames", c.kernel.max_frames}};
  j["fad_infinity"] = {{"subsample_sizes", c.fad_infinity.subsample_sizes},
                       {"draws_per_size", c.fad_infinity.draws_per_size},
                       {"default_size_count", c.fad_infinity.default_size_count}};
  j["frechet"] = {{"ridge", c.frechet.ridge}};
  j["eval"] = {{"include_hidden_reference", c.eval.include_hidden_reference},
               {"pooling", PoolingName(c.eval.pooling)},
               {"max_failure_fraction", c.eval.max_failure_fraction}};
  j["batch"] = {{"batch_size", c.batch.batch_size},
                {"tonal_fraction", c.batch.tonal_fraction},
                {"num_batches", c.batch.num_batches}};
  j["params"] = c.params;
  return j;
}

void WriteRunConfig(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << RunConfigToJson(c).dump(2) << "\n";
}

}  // namespace audiodist
