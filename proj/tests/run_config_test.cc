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

#include "audiodist/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiodist {
namespace {

TEST(RunConfigTest, TomlOverridesDefaults) {
  const RunConfig c = ParseRunConfigToml(R"(
seed = 42
threads = 2

[mel]
n_fft = 1024
hop = 256

[synth]
f_range = [300.0, 3000.0]
event_rate = 2.5

[kernel]
bandwidth_mode = "fixed"
sigma = 10.0

[fad_infinity]
subsample_sizes = [10, 20, 40]
)");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.mel.n_fft, 1024);
  EXPECT_EQ(c.mel.hop, 256);
  EXPECT_EQ(c.mel.n_mels, 128);
  EXPECT_EQ(c.synth.f_range.lo, 300.0);
  EXPECT_EQ(c.synth.f_range.hi, 3000.0);
  EXPECT_EQ(c.synth.event_rate, 2.5);
  EXPECT_EQ(c.kernel.bandwidth_mode, BandwidthMode::kFixed);
  EXPECT_EQ(c.kernel.sigma, 10.0);
  EXPECT_EQ(c.fad_infinity.subsample_sizes, (std::vector<int64_t>{10, 20, 40}));
  EXPECT_EQ(c.synth.seed, 42u);
  EXPECT_EQ(c.kernel.seed, 42u);
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(ParseRunConfigToml("bogus = 1\n"), ConfigError);
  EXPECT_THROW(ParseRunConfigToml("[mel]\nnfft = 1\n"), ConfigError);
  EXPECT_THROW(ParseRunConfigToml("[mel]\nn_fft = \"big\"\n"), ConfigError);
  EXPECT_THROW(ParseRunConfigToml("[synth]\nf_range = [1.0]\n"), ConfigError);
  EXPECT_THROW(ParseRunConfigToml("this is not toml ["), ConfigError);
}

TEST(RunConfigTest, JsonRoundTrip) {
  RunConfig c;
  c.subcommand = "dist";
  c.seed = 7;
  c.mel.n_mels = 64;
  c.synth.vibrato_depth_cents = {0.0, 10.0};
  c.kernel.alpha = 50.0;
  c.eval.pooling = Pooling::kPerCondition;
  c.batch.batch_size = 32;
  c.params = {{"metric", "fad"}};
  c.PropagateSeed();
  const nlohmann::json j = RunConfigToJson(c);
  const RunConfig back = RunConfigFromJson(j);
  EXPECT_EQ(RunConfigToJson(back), j);

  const auto dir = audiodist::testing::TempDir("run_config");
  WriteRunConfig(dir / "run_config.json", c);
  EXPECT_EQ(RunConfigToJson(LoadRunConfig(dir / "run_config.json")), j);
  std::ofstream(dir / "c.toml") << "seed = 3\n";
  EXPECT_EQ(LoadRunConfig(dir / "c.toml").seed, 3u);
}

}  // namespace
}  // namespace audiodist
