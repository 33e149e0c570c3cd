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

#ifndef AUDIODIST_RUN_CONFIG_H_
#define AUDIODIST_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "audiodist/distance.h"
#include "audiodist/eval.h"
#include "audiodist/mel.h"
#include "audiodist/tonal_synth.h"
#include <nlohmann/json.hpp>

namespace audiodist {

struct BatchSettings {
  int batch_size = 48;
  double tonal_fraction = 0.33;
  int num_batches = 1;
};

// Everything a CLI run depends on. Read from TOML (hand-written input) or
// from the JSON a previous run emitted; written back as JSON next to every
// run's outputs. The top-level seed drives every seeded component.
struct RunConfig {
  std::string subcommand;
  uint64_t seed = 0;
  // 0 = all hardware threads. Results do not depend on it.
  size_t threads = 0;
  MelConfig mel;
  TonalSynthConfig synth;
  RbfKernelConfig kernel;
  FadInfinityConfig fad_infinity;
  FrechetOptions frechet;
  EvalOptions eval;
  BatchSettings batch;
  // Subcommand arguments (paths, metric names, counts), recorded verbatim.
  nlohmann::json params = nlohmann::json::object();

  // Pushes `seed` into the per-module seeds.
  void PropagateSeed();
};

// Unknown tables or keys are rejected with ConfigError.
RunConfig ParseRunConfigToml(std::string_view text);
RunConfig RunConfigFromJson(const nlohmann::json& j);
// Dispatches on extension: .json reads a resolved config, anything else TOML.
RunConfig LoadRunConfig(const std::filesystem::path& path);

nlohmann::json RunConfigToJson(const RunConfig& c);
void WriteRunConfig(const std::filesystem::path& path, const RunConfig& c);

}  // namespace audiodist

#endif  // AUDIODIST_RUN_CONFIG_H_
