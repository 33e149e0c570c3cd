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

#ifndef AUDIODIST_WAV_H_
#define AUDIODIST_WAV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace audiodist {

// Mono audio. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 48000;
};

enum class WavSampleFormat { kPcm16, kPcm24, kFloat32 };

struct WavReadOptions {
  // Multichannel input is averaged to mono unless a channel is selected.
  std::optional<int> channel;
};

struct WavReadResult {
  AudioBuffer audio;
  int channels = 1;
  WavSampleFormat format = WavSampleFormat::kPcm16;
  bool downmixed = false;
};

// RIFF/WAVE reader for PCM 16/24-bit and IEEE float32 (including
// WAVE_FORMAT_EXTENSIBLE). Throws FormatError or ValidationError.
WavReadResult ParseWav(std::string_view bytes, const WavReadOptions& options = {});
WavReadResult ReadWav(const std::filesystem::path& path,
                      const WavReadOptions& options = {});

// Mono writer. PCM formats clip to [-1, 1].
std::string SerializeWav(const AudioBuffer& audio,
                         WavSampleFormat format = WavSampleFormat::kFloat32);
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio,
              WavSampleFormat format = WavSampleFormat::kFloat32);

}  // namespace audiodist

#endif  // AUDIODIST_WAV_H_
