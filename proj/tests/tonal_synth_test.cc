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
#include <set>
#include <vector>

#include "audiodist/error.h"
#include "audiodist/mel.h"
#include "gtest/gtest.h"

namespace audiodist {
namespace {

TonalEventSpec PlainEvent(double f0, double tau, double peak_db = -6.0) {
  TonalEventSpec e;
  e.onset = 0.0;
  e.f0 = f0;
  e.peak_db = peak_db;
  e.decay_tau = tau;
  e.partial_amps = {std::pow(10.0, peak_db / 20.0)};
  return e;
}

// Least-squares slope of y against x.
double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

TEST(TonalSynthConfigTest, Validation) {
  TonalSynthConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.f_range = {8000.0, 200.0};
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.duration = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.decay_range = {0.0, 1.0};
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.partials_max = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(SampleEventsTest, DeterministicAndWithinRanges) {
  TonalSynthConfig c;
  c.duration = 2.0;
  const auto a = SampleEvents(c, 17);
  const auto b = SampleEvents(c, 17);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].onset, b[i].onset);
    EXPECT_EQ(a[i].f0, b[i].f0);
    EXPECT_EQ(a[i].partial_amps, b[i].partial_amps);
  }
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const auto events = SampleEvents(c, seed);
    EXPECT_TRUE(std::is_sorted(events.begin(), events.end(),
                               [](const auto& x, const auto& y) { return x.onset < y.onset; }));
    for (const auto& e : events) {
      EXPECT_GE(e.onset, 0.0);
      EXPECT_LT(e.onset, c.duration);
      EXPECT_GE(e.f0, c.f_range.lo);
      EXPECT_LE(e.f0, c.f_range.hi);
      EXPECT_GE(e.decay_tau, c.decay_range.lo);
      EXPECT_LE(e.decay_tau, c.decay_range.hi);
      ASSERT_GE(e.partial_amps.size(), 1u);
      ASSERT_LE(e.partial_amps.size(), static_cast<size_t>(c.partials_max));
      double sum = 0.0;
      for (double amp : e.partial_amps) sum += amp;
      EXPECT_NEAR(sum, std::pow(10.0, e.peak_db / 20.0), 1e-12);
      for (size_t p = 1; p < e.partial_amps.size(); ++p) {
        EXPECT_NEAR(20.0 * std::log10(e.partial_amps[p - 1] / e.partial_amps[p]),
                    c.partial_rolloff_db, 1e-9);
      }
    }
  }
}

TEST(SampleEventsTest, DegenerateFrequencyRange) {
  TonalSynthConfig c;
  c.f_range = {440.0, 440.0};
  for (uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& e : SampleEvents(c, seed)) EXPECT_EQ(e.f0, 440.0);
  }
}

TEST(RenderExcerptTest, ZeroEventsIsSilence) {
  TonalSynthConfig c;
  const AudioBuffer a = RenderExcerpt({}, c);
  EXPECT_EQ(a.samples.size(), 48000u);
  EXPECT_EQ(a.sample_rate, 48000);
  EXPECT_TRUE(std::all_of(a.samples.begin(), a.samples.end(),
                          [](double s) { return s == 0.0; }));
}

TEST(RenderExcerptTest, SingleEventPeakAndDecay) {
  TonalSynthConfig c;
  const double f0 = 1000.0, tau = 0.2;
  const AudioBuffer a = RenderExcerpt({PlainEvent(f0, tau)}, c);
  MelConfig m;
  const RowMatrix mag = StftMagnitude(a, m);
  const double bin_hz = static_cast<double>(c.sample_rate) / m.n_fft;
  Eigen::Index peak_bin;
  mag.row(2).maxCoeff(&peak_bin);
  EXPECT_LE(std::abs(peak_bin * bin_hz - f0), bin_hz);

  std::vector<double> t, log_mag;
  const auto fade_start = static_cast<Eigen::Index>(
      a.samples.size() - std::llround(kFadeOutSeconds * c.sample_rate));
  for (Eigen::Index f = 0; f < mag.rows(); ++f) {
    if (f * m.hop + m.n_fft > fade_start) break;
    t.push_back(static_cast<double>(f * m.hop) / c.sample_rate);
    log_mag.push_back(std::log(mag(f, peak_bin)));
  }
  ASSERT_GE(t.size(), 10u);
  EXPECT_NEAR(Slope(t, log_mag), -1.0 / tau, 0.05 / tau);
}

TEST(RenderExcerptTest, PartialsAboveNyquistAreDropped) {
  TonalSynthConfig c;
  c.sample_rate = 16000;
  TonalEventSpec e = PlainEvent(5000.0, 0.5);
  e.partial_amps = {0.3, 0.3, 0.3};  // 10 kHz and 15 kHz would alias.
  const AudioBuffer a = RenderExcerpt({e}, c);
  MelConfig m;
  m.sample_rate = 16000;
  const RowMatrix mag = StftMagnitude(a, m);
  const double bin_hz = 16000.0 / m.n_fft;
  const double peak = mag.row(1).maxCoeff();
  const auto alias_bin = static_cast<Eigen::Index>(std::lround(6000.0 / bin_hz));
  const auto alias_bin2 = static_cast<Eigen::Index>(std::lround(1000.0 / bin_hz));
  const double floor_ratio = std::pow(10.0, -80.0 / 20.0);
  EXPECT_LT(mag.row(1).segment(alias_bin - 3, 7).maxCoeff(), peak * floor_ratio);
  EXPECT_LT(mag.row(1).segment(alias_bin2 - 3, 7).maxCoeff(), peak * floor_ratio);
}

TEST(RenderExcerptTest, PeakAndDcBounds) {
  TonalSynthConfig c;
  c.event_rate = 30.0;
  c.level_range_db = {-6.0, 0.0};
  bool saw_normalization = false;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const AudioBuffer a = RenderExcerpt(SampleEvents(c, seed), c);
    double peak = 0.0, mean = 0.0;
    for (double s : a.samples) {
      peak = std::max(peak, std::abs(s));
      mean += s / a.samples.size();
    }
    EXPECT_LE(peak, 1.0);
    EXPECT_LT(std::abs(mean), 1e-3);
    if (std::abs(peak - std::pow(10.0, kNormalizedPeakDb / 20.0)) < 1e-12) {
      saw_normalization = true;
    }
  }
  EXPECT_TRUE(saw_normalization);
}

TEST(RenderExcerptTest, DeterministicForSeed) {
  TonalSynthConfig c;
  const AudioBuffer a = RenderExcerpt(SampleEvents(c, 5), c);
  const AudioBuffer b = RenderExcerpt(SampleEvents(c, 5), c);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(ComposeBatchTest, DefaultBatchShape) {
  const std::vector<std::string> pool = {"a.wav", "b.wav", "c.wav", "d.wav"};
  EXPECT_EQ(TonalSlots(48, 0.33), 16);
  const BatchManifest b = ComposeBatch(pool, 48, 0.33, 1);
  EXPECT_EQ(b.TonalCount(), 16);
  EXPECT_EQ(b.entries.size(), 48u);
  EXPECT_TRUE(b.with_replacement);
}

TEST(ComposeBatchTest, TonalCountForAllSizes) {
  std::vector<std::string> pool;
  for (int i = 0; i < 600; ++i) pool.push_back("real_" + std::to_string(i) + ".wav");
  for (double fraction : {0.0, 0.25, 0.33, 0.5, 1.0}) {
    for (int size = 1; size <= 512; ++size) {
      const BatchManifest b = ComposeBatch(pool, size, fraction, size);
      const int expected = static_cast<int>(std::floor(size * fraction + 0.5));
      ASSERT_EQ(b.TonalCount(), expected) << size << " " << fraction;
      ASSERT_EQ(static_cast<int>(b.entries.size()), size);
    }
  }
}

TEST(ComposeBatchTest, RealEntriesWithoutReplacementAndFreshSeeds) {
  std::vector<std::string> pool;
  for (int i = 0; i < 100; ++i) pool.push_back(std::to_string(i));
  const BatchManifest b = ComposeBatch(pool, 48, 0.33, 9);
  EXPECT_FALSE(b.with_replacement);
  std::set<std::string> real;
  std::set<uint64_t> seeds;
  for (const auto& e : b.entries) {
    if (e.kind == BatchEntryKind::kReal) real.insert(e.source);
    if (e.kind == BatchEntryKind::kTonal) seeds.insert(e.synth_seed);
  }
  EXPECT_EQ(real.size(), 32u);
  EXPECT_EQ(seeds.size(), 16u);
  const BatchManifest again = ComposeBatch(pool, 48, 0.33, 9);
  for (size_t i = 0; i < b.entries.size(); ++i) {
    EXPECT_EQ(b.entries[i].source, again.entries[i].source);
    EXPECT_EQ(b.entries[i].synth_seed, again.entries[i].synth_seed);
  }
  // Tonal entries are not all at the front.
  const auto first_real = std::find_if(b.entries.begin(), b.entries.end(), [](const auto& e) {
    return e.kind == BatchEntryKind::kReal;
  });
  EXPECT_LT(first_real - b.entries.begin(), 16);
}

TEST(ComposeBatchTest, EdgeFractionsAndErrors) {
  EXPECT_EQ(ComposeBatch({}, 10, 1.0, 1).TonalCount(), 10);
  EXPECT_EQ(ComposeBatch({"x"}, 10, 0.0, 1).TonalCount(), 0);
  EXPECT_THROW(ComposeBatch({}, 10, 0.5, 1), ConfigError);
  EXPECT_THROW(ComposeBatch({"x"}, 0, 0.5, 1), ConfigError);
  EXPECT_THROW(ComposeBatch({"x"}, 10, 1.5, 1), ConfigError);
}

}  // namespace
}  // namespace audiodist
