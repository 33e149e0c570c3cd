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

#include "audiodist/tonal_synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "audiodist/error.h"
#include "audiodist/random.h"

namespace audiodist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Envelopes are rendered until they fall below exp(-16), about -139 dB.
constexpr double kEnvelopeSpan = 16.0;

void CheckRange(const Range& r, const char* name, bool positive) {
  const bool finite = std::isfinite(r.lo) && std::isfinite(r.hi);
  if (!finite || r.lo > r.hi || (positive && r.lo <= 0.0)) {
    throw ConfigError(std::string("invalid ") + name + " [" +
                      std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
  }
}

}  // namespace

void TonalSynthConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(event_rate > 0.0)) throw ConfigError("event_rate must be positive");
  CheckRange(f_range, "f_range", true);
  CheckRange(level_range_db, "level_range_db", false);
  CheckRange(decay_range, "decay_range", true);
  CheckRange(vibrato_depth_cents, "vibrato_depth_cents", false);
  CheckRange(vibrato_rate_hz, "vibrato_rate_hz", false);
  if (vibrato_depth_cents.lo < 0.0 || vibrato_rate_hz.lo < 0.0) {
    throw ConfigError("vibrato ranges must be non-negative");
  }
  if (partials_max < 1) throw ConfigError("partials_max must be >= 1");
  if (!(partial_rolloff_db >= 0.0)) {
    throw ConfigError("partial_rolloff_db must be >= 0");
  }
}

std::vector<TonalEventSpec> SampleEvents(const TonalSynthConfig& config,
                                         uint64_t rng_seed) {
  config.Validate();
  Rng rng = MakeStream(rng_seed);
  const int64_t count = Poisson(rng, config.event_rate * config.duration);
  std::vector<TonalEventSpec> events;
  events.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    TonalEventSpec e;
    e.onset = UniformReal(rng, 0.0, config.duration);
    e.f0 = LogUniform(rng, config.f_range.lo, config.f_range.hi);
    e.peak_db =
        UniformReal(rng, config.level_range_db.lo, config.level_range_db.hi);
    e.decay_tau = LogUniform(rng, config.decay_range.lo, config.decay_range.hi);
    const auto partials =
        1 + static_cast<int>(UniformBelow(rng, static_cast<uint64_t>(config.partials_max)));
    e.vibrato.depth_cents = UniformReal(rng, config.vibrato_depth_cents.lo,
                                        config.vibrato_depth_cents.hi);
    e.vibrato.rate_hz =
        UniformReal(rng, config.vibrato_rate_hz.lo, config.vibrato_rate_hz.hi);

    double weight_sum = 0.0;
    for (int p = 0; p < partials; ++p) {
      e.partial_amps.push_back(
          std::pow(10.0, -config.partial_rolloff_db * p / 20.0));
      weight_sum += e.partial_amps.back();
    }
    const double peak = std::pow(10.0, e.peak_db / 20.0);
    for (double& a : e.partial_amps) a *= peak / weight_sum;
    events.push_back(std::move(e));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const TonalEventSpec& a, const TonalEventSpec& b) {
                     return a.onset < b.onset;
                   });
  return events;
}

AudioBuffer RenderExcerpt(const std::vector<TonalEventSpec>& events,
                          const TonalSynthConfig& config) {
  config.Validate();
  const double sr = config.sample_rate;
  const auto length = static_cast<size_t>(std::llround(config.duration * sr));
  const double nyquist = sr / 2.0;
  AudioBuffer out;
  out.sample_rate = config.sample_rate;
  out.samples.assign(length, 0.0);

  std::vector<double> envelope;
  std::vector<double> ratio;
  for (const TonalEventSpec& e : events) {
    const auto start = static_cast<size_t>(std::ceil(e.onset * sr));
    if (start >= length || e.decay_tau <= 0.0) continue;
    const size_t span = static_cast<size_t>(std::ceil(kEnvelopeSpan * e.decay_tau * sr));
    const size_t end = std::min(length, start + span);
    const size_t n = end - start;

    envelope.resize(n);
    ratio.resize(n);
    const double depth_octaves = e.vibrato.depth_cents / 1200.0;
    for (size_t i = 0; i < n; ++i) {
      const double dt = static_cast<double>(start + i) / sr - e.onset;
      envelope[i] = std::exp(-dt / e.decay_tau);
      ratio[i] = depth_octaves == 0.0
                     ? 1.0
                     : std::exp2(depth_octaves *
                                 std::sin(kTwoPi * e.vibrato.rate_hz * dt));
    }
    const double max_ratio = std::exp2(depth_octaves);

    for (size_t p = 0; p < e.partial_amps.size(); ++p) {
      const double f = e.f0 * static_cast<double>(p + 1);
      if (f * max_ratio >= nyquist) break;  // higher partials are higher still
      const double amp = e.partial_amps[p];
      const double step = kTwoPi * f / sr;
      double phase = std::numbers::pi / 2.0;
      for (size_t i = 0; i < n; ++i) {
        out.samples[start + i] += amp * envelope[i] * std::sin(phase);
        phase += step * ratio[i];
        if (phase > kTwoPi) phase -= kTwoPi;
      }
    }
  }

  const auto fade = std::min(
      length, static_cast<size_t>(std::llround(kFadeOutSeconds * sr)));
  for (size_t i = 0; i < fade; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(fade);
    // Raised-cosine ramp from 1 down to 0 over the final samples.
    out.samples[length - fade + i] *= 0.5 + 0.5 * std::cos(std::numbers::pi * x);
  }

  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 1.0) {
    const double gain = std::pow(10.0, kNormalizedPeakDb / 20.0) / peak;
    for (double& s : out.samples) s *= gain;
  }
  return out;
}

int BatchManifest::TonalCount() const {
  return static_cast<int>(std::count_if(
      entries.begin(), entries.end(),
      [](const BatchEntry& e) { return e.kind == BatchEntryKind::kTonal; }));
}

int TonalSlots(int batch_size, double tonal_fraction) {
  return static_cast<int>(std::lround(batch_size * tonal_fraction));
}

BatchManifest ComposeBatch(const std::vector<std::string>& real_pool,
                           int batch_size, double tonal_fraction,
                           uint64_t rng_seed) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(tonal_fraction >= 0.0 && tonal_fraction <= 1.0)) {
    throw ConfigError("tonal_fraction must be in [0, 1]");
  }
  const int n_tonal = TonalSlots(batch_size, tonal_fraction);
  const int n_real = batch_size - n_tonal;
  if (n_real > 0 && real_pool.empty()) {
    throw ConfigError("real-audio pool is empty but the batch needs " +
                      std::to_string(n_real) + " real entries");
  }

  Rng rng = MakeStream(rng_seed);
  BatchManifest batch;
  batch.batch_size = batch_size;
  batch.tonal_fraction = tonal_fraction;
  batch.entries.reserve(static_cast<size_t>(batch_size));

  const auto needed = static_cast<size_t>(n_real);
  if (real_pool.size() >= needed) {
    for (size_t idx : SampleWithoutReplacement(rng, real_pool.size(), needed)) {
      batch.entries.push_back({BatchEntryKind::kReal, real_pool[idx], 0});
    }
  } else {
    batch.with_replacement = true;
    for (size_t i = 0; i < needed; ++i) {
      const auto idx = static_cast<size_t>(UniformBelow(rng, real_pool.size()));
      batch.entries.push_back({BatchEntryKind::kReal, real_pool[idx], 0});
    }
  }
  for (int i = 0; i < n_tonal; ++i) {
    batch.entries.push_back({BatchEntryKind::kTonal, "", rng()});
  }
  Shuffle(rng, std::span<BatchEntry>(batch.entries));
  return batch;
}

}  // namespace audiodist
