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

#ifndef AUDIODIST_TONAL_SYNTH_H_
#define AUDIODIST_TONAL_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "audiodist/wav.h"

namespace audiodist {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Parameters of the synthetic tonal material. Every default is a choice of
// this toolkit (glockenspiel/triangle-like struck tones).
struct TonalSynthConfig {
  int sample_rate = 48000;
  double duration = 1.0;  // seconds
  // Mean number of events per second (Poisson rate).
  double event_rate = 6.0;
  Range f_range = {200.0, 8000.0};  // Hz, log-uniform fundamental
  Range level_range_db = {-24.0, -6.0};  // dBFS peak per event
  Range decay_range = {0.05, 1.0};  // seconds, log-uniform decay constant
  int partials_max = 8;
  double partial_rolloff_db = 6.0;  // attenuation per partial
  Range vibrato_depth_cents = {0.0, 50.0};
  Range vibrato_rate_hz = {4.0, 7.0};
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct Vibrato {
  double depth_cents = 0.0;
  double rate_hz = 0.0;
};

struct TonalEventSpec {
  double onset = 0.0;  // seconds
  double f0 = 440.0;   // Hz
  double peak_db = -12.0;
  double decay_tau = 0.2;  // seconds
  // Linear gain of partial p + 1 (frequency (p + 1) * f0). The gains sum to
  // the event's peak amplitude 10^(peak_db / 20).
  std::vector<double> partial_amps;
  Vibrato vibrato;
};

// Draws K ~ Poisson(event_rate * duration) events: onsets uniform on
// [0, duration), f0 and decay_tau log-uniform, peak_db uniform, partial
// count uniform on [1, partials_max] with a fixed dB rolloff, vibrato depth
// and rate uniform. Deterministic for a given seed.
std::vector<TonalEventSpec> SampleEvents(const TonalSynthConfig& config,
                                         uint64_t rng_seed);

// Additive rendering: each partial p follows a phase integrated from
// p * f0 * 2^(vibrato cents / 1200), starts in cosine phase at the onset
// (no DC step from the sine start) and decays as exp(-(t - onset) / tau).
// Partials whose highest instantaneous frequency reaches Nyquist are
// dropped. The last 10 ms are faded out. If the mix peaks above 1.0 it is
// scaled to -1 dBFS; quieter mixes are left untouched.
AudioBuffer RenderExcerpt(const std::vector<TonalEventSpec>& events,
                          const TonalSynthConfig& config);

inline constexpr double kNormalizedPeakDb = -1.0;
inline constexpr double kFadeOutSeconds = 0.010;

enum class BatchEntryKind { kReal, kTonal };

struct BatchEntry {
  BatchEntryKind kind = BatchEntryKind::kReal;
  std::string source;        // real entries: path into the pool
  uint64_t synth_seed = 0;   // tonal entries
};

struct BatchManifest {
  int batch_size = 0;
  double tonal_fraction = 0.0;
  // Real entries were drawn with replacement because the pool was smaller
  // than the number of real slots.
  bool with_replacement = false;
  std::vector<BatchEntry> entries;

  int TonalCount() const;
};

// round-half-away-from-zero(batch_size * tonal_fraction).
int TonalSlots(int batch_size, double tonal_fraction);

// Mixes TonalSlots() freshly seeded tonal entries with real entries drawn
// uniformly from the pool, then shuffles the order. Throws ConfigError on
// invalid sizes or an empty pool when real entries are needed.
BatchManifest ComposeBatch(const std::vector<std::string>& real_pool,
                           int batch_size, double tonal_fraction,
                           uint64_t rng_seed);

}  // namespace audiodist

#endif  // AUDIODIST_TONAL_SYNTH_H_
