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

#include "audiodist/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "audiodist/distance.h"
#include "audiodist/embedding_store.h"
#include "audiodist/error.h"
#include "audiodist/eval.h"
#include "audiodist/mel.h"
#include "audiodist/parallel.h"
#include "audiodist/random.h"
#include "audiodist/run_config.h"
#include "audiodist/tonal_synth.h"
#include "audiodist/wav.h"

namespace audiodist {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for bad invocations that CLI11 cannot catch itself (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string VersionString() {
  return std::string("audiodist ") + AUDIODIST_VERSION + " (npy " +
         kNpyFormatVersion + ", manifest " +
         std::to_string(kManifestFormatVersion) + ", report " +
         std::to_string(kReportFormatVersion) + ")";
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<fs::path> CollectFiles(const std::vector<std::string>& inputs,
                                   const std::string& extension) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

json DistanceJson(const DistanceResult& r) {
  json j = {{"metric", MetricName(r.metric)},
            {"value", r.value},
            {"n_frames_x", r.n_frames_x},
            {"n_frames_y", r.n_frames_y}};
  j["sigma_used"] = r.sigma_used ? json(*r.sigma_used) : json(nullptr);
  return j;
}

json EventJson(const TonalEventSpec& e) {
  return {{"onset", e.onset},
          {"f0", e.f0},
          {"peak_db", e.peak_db},
          {"decay_tau", e.decay_tau},
          {"partial_amps", e.partial_amps},
          {"vibrato_depth_cents", e.vibrato.depth_cents},
          {"vibrato_rate_hz", e.vibrato.rate_hz}};
}

json BatchJson(const BatchManifest& b, int index) {
  json entries = json::array();
  for (const auto& e : b.entries) {
    if (e.kind == BatchEntryKind::kTonal) {
      entries.push_back({{"kind", "tonal"}, {"synth_seed", e.synth_seed}});
    } else {
      entries.push_back({{"kind", "real"}, {"source", e.source}});
    }
  }
  return {{"batch_index", index},
          {"batch_size", b.batch_size},
          {"tonal_fraction", b.tonal_fraction},
          {"n_tonal", b.TonalCount()},
          {"with_replacement", b.with_replacement},
          {"entries", entries}};
}

// Options shared by every subcommand.
struct GlobalOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<size_t> threads;
};

RunConfig ResolveBase(const GlobalOptions& g, const std::string& subcommand) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : LoadRunConfig(g.config_path);
  c.subcommand = subcommand;
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  c.PropagateSeed();
  SetMaxThreads(c.threads);
  return c;
}

// --- embed -----------------------------------------------------------------

struct EmbedArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::optional<int> channel;
  std::optional<int> sample_rate, n_fft, hop, n_mels;
  std::optional<double> f_min, f_max, log_floor;
  bool float64 = false;
};

int CmdEmbed(const GlobalOptions& g, const EmbedArgs& a, std::ostream& out,
             std::ostream& err) {
  RunConfig c = ResolveBase(g, "embed");
  if (a.sample_rate) c.mel.sample_rate = *a.sample_rate;
  if (a.n_fft) c.mel.n_fft = *a.n_fft;
  if (a.hop) c.mel.hop = *a.hop;
  if (a.n_mels) c.mel.n_mels = *a.n_mels;
  if (a.f_min) c.mel.f_min = *a.f_min;
  if (a.f_max) c.mel.f_max = *a.f_max;
  if (a.log_floor) c.mel.log_floor = *a.log_floor;
  c.mel.Validate();
  c.params = {{"inputs", a.inputs},
              {"out", a.out_dir},
              {"dtype", a.float64 ? "float64" : "float32"}};
  if (a.channel) c.params["channel"] = *a.channel;

  const std::vector<fs::path> files = CollectFiles(a.inputs, ".wav");
  if (files.empty()) throw UsageError("no input WAV files found");
  EnsureDir(a.out_dir);

  WavReadOptions read_options;
  read_options.channel = a.channel;
  const NpyDtype dtype = a.float64 ? NpyDtype::kFloat64 : NpyDtype::kFloat32;
  std::vector<std::string> messages(files.size());
  std::vector<char> failed(files.size(), 0);
  ParallelFor(files.size(), [&](size_t i) {
    try {
      const WavReadResult wav = ReadWav(files[i], read_options);
      if (wav.downmixed) {
        messages[i] = "warning: " + files[i].string() + ": " +
                      std::to_string(wav.channels) +
                      "-channel input downmixed to mono";
      }
      const EmbeddingSet e = MelEmbed(wav.audio, c.mel, files[i].stem().string());
      SaveEmbeddings(fs::path(a.out_dir) / (files[i].stem().string() + ".npy"), e,
                     dtype);
    } catch (const Error& e) {
      failed[i] = 1;
      messages[i] = "warning: skipping " + files[i].string() + ": " + e.what();
    }
  });
  size_t skipped = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    if (!messages[i].empty()) err << messages[i] << "\n";
    skipped += static_cast<size_t>(failed[i]);
  }
  WriteRunConfig(fs::path(a.out_dir) / "run_config.json", c);
  out << "embedded " << files.size() - skipped << " of " << files.size()
      << " file(s) into " << a.out_dir << "\n";
  return skipped > 0 ? kExitRuntimeError : kExitOk;
}

// --- dist ------------------------------------------------------------------

struct DistArgs {
  std::string metric = "fad";
  std::string ref;
  std::string test;
  std::optional<std::string> sigma_mode;
  std::optional<double> sigma, alpha, ridge;
  std::optional<size_t> max_frames;
  std::vector<int64_t> sizes;
  std::optional<int> draws;
  bool sigma_sweep = false;
  std::string out_path;
};

int CmdDist(const GlobalOptions& g, const DistArgs& a, std::ostream& out) {
  RunConfig c = ResolveBase(g, "dist");
  if (a.sigma_mode) {
    if (*a.sigma_mode == "fixed") {
      c.kernel.bandwidth_mode = BandwidthMode::kFixed;
    } else if (*a.sigma_mode == "median") {
      c.kernel.bandwidth_mode = BandwidthMode::kMedianHeuristic;
    } else {
      throw UsageError("--sigma-mode must be 'median' or 'fixed'");
    }
  }
  if (a.sigma) c.kernel.sigma = *a.sigma;
  if (a.alpha) c.kernel.alpha = *a.alpha;
  if (a.max_frames) c.kernel.max_frames = *a.max_frames;
  if (a.ridge) c.frechet.ridge = *a.ridge;
  if (!a.sizes.empty()) c.fad_infinity.subsample_sizes = a.sizes;
  if (a.draws) c.fad_infinity.draws_per_size = *a.draws;
  c.fad_infinity.frechet = c.frechet;
  c.params = {{"metric", a.metric}, {"ref", a.ref}, {"test", a.test},
              {"sigma_sweep", a.sigma_sweep}};

  const EmbeddingSet ref = LoadCorpus(a.ref);
  const EmbeddingSet test = LoadCorpus(a.test, ref.dim());

  json result;
  if (a.sigma_sweep) {
    if (a.metric != "mmd") throw UsageError("--sigma-sweep requires --metric mmd");
    result["metric"] = MetricName(Metric::kMmdScaled);
    result["sweep"] = json::array();
    for (const auto& entry : MmdSigmaSweep(ref, test, c.kernel)) {
      json row = DistanceJson(entry.result);
      row["bandwidth_mode"] = BandwidthModeName(entry.mode);
      result["sweep"].push_back(row);
    }
  } else if (a.metric == "fad") {
    result = DistanceJson(Fad(ref, test, c.frechet));
  } else if (a.metric == "fad-inf") {
    result = DistanceJson(FadInfinity(ref, test, c.fad_infinity));
  } else if (a.metric == "mmd") {
    result = DistanceJson(MmdScaled(ref, test, c.kernel));
  } else {
    throw UsageError("--metric must be fad, fad-inf or mmd");
  }
  result["ref"] = a.ref;
  result["test"] = a.test;
  result["config"] = RunConfigToJson(c);
  const std::string text = result.dump(2);
  out << text << "\n";
  if (!a.out_path.empty()) {
    std::ofstream file(a.out_path, std::ios::trunc);
    if (!file) throw IoError("cannot write " + a.out_path);
    file << text << "\n";
  }
  return kExitOk;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  int count = 1;
  std::string out_dir;
  bool pcm16 = false;
  std::optional<double> duration, event_rate;
};

int CmdSynth(const GlobalOptions& g, const SynthArgs& a, std::ostream& out) {
  RunConfig c = ResolveBase(g, "synth");
  if (a.duration) c.synth.duration = *a.duration;
  if (a.event_rate) c.synth.event_rate = *a.event_rate;
  c.synth.Validate();
  if (a.count < 1) throw UsageError("--count must be >= 1");
  c.params = {{"count", a.count},
              {"out", a.out_dir},
              {"format", a.pcm16 ? "pcm16" : "float32"}};
  EnsureDir(a.out_dir);

  const auto count = static_cast<size_t>(a.count);
  std::vector<json> lines(count);
  ParallelFor(count, [&](size_t i) {
    Rng stream = MakeStream(c.seed, i);
    const uint64_t excerpt_seed = stream();
    const auto events = SampleEvents(c.synth, excerpt_seed);
    const AudioBuffer audio = RenderExcerpt(events, c.synth);
    char name[32];
    std::snprintf(name, sizeof(name), "tonal_%05zu.wav", i);
    WriteWav(fs::path(a.out_dir) / name, audio,
             a.pcm16 ? WavSampleFormat::kPcm16 : WavSampleFormat::kFloat32);
    json events_json = json::array();
    for (const auto& e : events) events_json.push_back(EventJson(e));
    lines[i] = {{"file", name},
                {"index", i},
                {"synth_seed", excerpt_seed},
                {"events", events_json}};
  });
  std::ofstream manifest(fs::path(a.out_dir) / "manifest.jsonl", std::ios::trunc);
  if (!manifest) throw IoError("cannot write manifest in " + a.out_dir);
  for (const auto& line : lines) manifest << line.dump() << "\n";
  WriteRunConfig(fs::path(a.out_dir) / "run_config.json", c);
  out << "wrote " << count << " tonal excerpt(s) to " << a.out_dir << "\n";
  return kExitOk;
}

// --- batch -----------------------------------------------------------------

struct BatchArgs {
  std::vector<std::string> pool;
  std::optional<int> batch_size, num_batches;
  std::optional<double> fraction;
  std::string out_path;
};

int CmdBatch(const GlobalOptions& g, const BatchArgs& a, std::ostream& out) {
  RunConfig c = ResolveBase(g, "batch");
  if (a.batch_size) c.batch.batch_size = *a.batch_size;
  if (a.fraction) c.batch.tonal_fraction = *a.fraction;
  if (a.num_batches) c.batch.num_batches = *a.num_batches;
  if (c.batch.num_batches < 1) throw UsageError("--num-batches must be >= 1");
  c.params = {{"pool", a.pool}, {"out", a.out_path}};

  std::vector<std::string> pool;
  for (const auto& p : CollectFiles(a.pool, ".wav")) pool.push_back(p.string());
  std::ofstream file(a.out_path, std::ios::trunc);
  if (!file) throw IoError("cannot write " + a.out_path);
  for (int b = 0; b < c.batch.num_batches; ++b) {
    Rng stream = MakeStream(c.seed, static_cast<uint64_t>(b));
    const BatchManifest batch = ComposeBatch(pool, c.batch.batch_size,
                                             c.batch.tonal_fraction, stream());
    file << BatchJson(batch, b).dump() << "\n";
  }
  fs::path config_path = fs::path(a.out_path);
  config_path.replace_extension(".run_config.json");
  WriteRunConfig(config_path, c);
  out << "wrote " << c.batch.num_batches << " batch(es) to " << a.out_path << "\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> manifests;
  std::vector<std::string> metrics = {"fad", "mmd_median"};
  std::string out_dir;
  std::string scores_csv;
  bool include_hidden_reference = false;
  bool per_condition = false;
  std::vector<std::string> formats = {"json", "csv", "svg"};
};

std::vector<MetricSpec> ResolveMetrics(const std::vector<std::string>& names,
                                       const RunConfig& c) {
  std::vector<MetricSpec> specs;
  auto add = [&](MetricSpec s) {
    s.kernel.alpha = c.kernel.alpha;
    s.kernel.max_frames = c.kernel.max_frames;
    s.kernel.seed = c.kernel.seed;
    s.fad_infinity = c.fad_infinity;
    s.frechet = c.frechet;
    specs.push_back(std::move(s));
  };
  for (const auto& name : names) {
    if (name == "mmd_sweep") {
      for (double sigma : kSweepSigmas) add(MetricSpec::MmdFixed(sigma));
      add(MetricSpec::MmdMedian());
    } else {
      add(ParseMetricSpec(name));
    }
  }
  return specs;
}

int CmdEval(const GlobalOptions& g, const EvalArgs& a, std::ostream& out,
            std::ostream& err) {
  RunConfig c = ResolveBase(g, "eval");
  if (a.include_hidden_reference) c.eval.include_hidden_reference = true;
  if (a.per_condition) c.eval.pooling = Pooling::kPerCondition;
  c.params = {{"manifests", a.manifests}, {"metrics", a.metrics},
              {"out", a.out_dir}, {"formats", a.formats}};
  if (!a.scores_csv.empty()) {
    c.params["scores"] = a.scores_csv;
    if (a.manifests.size() != 1) {
      throw UsageError("--scores needs exactly one --manifest");
    }
  }
  std::vector<ReportFormat> formats;
  for (const auto& f : a.formats) {
    if (f == "json") {
      formats.push_back(ReportFormat::kJson);
    } else if (f == "csv") {
      formats.push_back(ReportFormat::kCsv);
    } else if (f == "svg") {
      formats.push_back(ReportFormat::kSvgScatter);
    } else {
      throw UsageError("unknown report format '" + f + "'");
    }
  }
  const std::vector<MetricSpec> metrics = ResolveMetrics(a.metrics, c);

  std::vector<CorrelationReport> reports;
  for (const auto& path : a.manifests) {
    EvalManifest m = LoadManifest(path, !a.scores_csv.empty());
    if (!a.scores_csv.empty()) MergeScoresCsv(m, a.scores_csv);
    reports.push_back(RunEval(m, metrics, c.eval));
  }
  const CorrelationReport report = MergeReports(reports);

  EnsureDir(a.out_dir);
  for (ReportFormat f : formats) EmitReport(report, f, a.out_dir);
  WriteRunConfig(fs::path(a.out_dir) / "run_config.json", c);

  size_t skipped = 0;
  for (const auto& p : report.pairs) {
    if (!p.error.empty()) {
      ++skipped;
      err << "warning: skipped (" << p.item_id << ", " << p.condition_id
          << ") for " << p.metric << ": " << p.error << "\n";
    }
  }
  for (const auto& row : report.rows) {
    out << row.embedding_label << " " << row.metric << " "
        << EvalFilterName(row.filter) << ": n=" << row.n_points
        << " Rp=" << row.r_pearson << " Rs=" << row.r_spearman << "\n";
  }
  if (skipped) out << skipped << " pair evaluation(s) skipped\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Embedding-distance audio quality toolkit", "audiodist"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VersionString());

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "TOML run config (or a run_config.json from an earlier run)");
  app.add_option("--seed", global.seed, "Seed for every seeded step");
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores)");
  app.fallthrough();

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Log-mel embeddings of WAV files");
  embed_cmd->add_option("inputs", embed.inputs, "WAV files or directories")->required();
  embed_cmd->add_option("--out", embed.out_dir, "Output directory")->required();
  embed_cmd->add_option("--channel", embed.channel, "Use one channel instead of downmixing");
  embed_cmd->add_option("--sample-rate", embed.sample_rate);
  embed_cmd->add_option("--n-fft", embed.n_fft);
  embed_cmd->add_option("--hop", embed.hop);
  embed_cmd->add_option("--n-mels", embed.n_mels);
  embed_cmd->add_option("--f-min", embed.f_min);
  embed_cmd->add_option("--f-max", embed.f_max);
  embed_cmd->add_option("--log-floor", embed.log_floor);
  embed_cmd->add_flag("--float64", embed.float64, "Write float64 arrays");

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distance between two embedding sets");
  dist_cmd->add_option("--metric", dist.metric, "fad | fad-inf | mmd")
      ->check(CLI::IsMember({"fad", "fad-inf", "mmd"}));
  dist_cmd->add_option("--ref", dist.ref, "Reference .npy file or corpus dir")->required();
  dist_cmd->add_option("--test", dist.test, "Test .npy file or corpus dir")->required();
  dist_cmd->add_option("--sigma-mode", dist.sigma_mode, "median | fixed");
  dist_cmd->add_option("--sigma", dist.sigma, "Fixed RBF bandwidth");
  dist_cmd->add_option("--alpha", dist.alpha, "MMD scale factor");
  dist_cmd->add_option("--max-frames", dist.max_frames, "MMD frame cap (0 = off)");
  dist_cmd->add_option("--ridge", dist.ridge, "Covariance ridge for FAD");
  dist_cmd->add_option("--sizes", dist.sizes, "FAD-inf subsample sizes")->delimiter(',');
  dist_cmd->add_option("--draws", dist.draws, "FAD-inf draws per size");
  dist_cmd->add_flag("--sigma-sweep", dist.sigma_sweep,
                     "MMD at sigma 1..10000 and the median heuristic");
  dist_cmd->add_option("--out", dist.out_path, "Also write the JSON here");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render synthetic tonal excerpts");
  synth_cmd->add_option("--count", synth.count, "Number of excerpts")->required();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_flag("--pcm16", synth.pcm16, "16-bit PCM instead of float32");
  synth_cmd->add_option("--duration", synth.duration, "Seconds per excerpt");
  synth_cmd->add_option("--event-rate", synth.event_rate, "Events per second");

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "Compose balanced training batches");
  batch_cmd->add_option("--pool", batch.pool, "Real-audio WAV files or directories");
  batch_cmd->add_option("--batch-size", batch.batch_size);
  batch_cmd->add_option("--fraction", batch.fraction, "Tonal share of each batch");
  batch_cmd->add_option("--num-batches", batch.num_batches);
  batch_cmd->add_option("--out", batch.out_path, "Output JSON-lines file")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Correlate distances with MUSHRA scores");
  eval_cmd->add_option("--manifest", eval.manifests, "Evaluation manifest(s)")->required();
  eval_cmd->add_option("--metrics", eval.metrics,
                       "fad, fad_infinity, mmd_median, mmd_sigma_<s>, mmd_sweep")
      ->delimiter(',');
  eval_cmd->add_option("--out", eval.out_dir, "Report directory")->required();
  eval_cmd->add_option("--scores", eval.scores_csv,
                       "CSV (item_id,condition_id,score) merged into a skeleton manifest");
  eval_cmd->add_flag("--include-hidden-reference", eval.include_hidden_reference);
  eval_cmd->add_flag("--per-condition", eval.per_condition,
                     "Correlate per-condition means instead of pooled pairs");
  eval_cmd->add_option("--formats", eval.formats, "json,csv,svg")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << VersionString() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    if (embed_cmd->parsed()) return CmdEmbed(global, embed, out, err);
    if (dist_cmd->parsed()) return CmdDist(global, dist, out);
    if (synth_cmd->parsed()) return CmdSynth(global, synth, out);
    if (batch_cmd->parsed()) return CmdBatch(global, batch, out);
    if (eval_cmd->parsed()) return CmdEval(global, eval, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitUsageError;
}

}  // namespace audiodist
