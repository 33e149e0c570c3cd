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

#include "audiodist/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "audiodist/error.h"

namespace audiodist {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t U16(const char* p) {
  uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

uint32_t U32(const char* p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

void PutU16(std::string& out, uint16_t v) {
  out.append(reinterpret_cast<const char*>(&v), 2);
}

void PutU32(std::string& out, uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

double DecodeSample(const char* p, WavSampleFormat format) {
  switch (format) {
    case WavSampleFormat::kPcm16:
      return static_cast<int16_t>(U16(p)) / 32768.0;
    case WavSampleFormat::kPcm24: {
      int32_t v = static_cast<uint8_t>(p[0]) |
                  (static_cast<uint8_t>(p[1]) << 8) |
                  (static_cast<int8_t>(p[2]) * 65536);
      return v / 8388608.0;
    }
    case WavSampleFormat::kFloat32: {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
  }
  return 0.0;
}

}  // namespace

WavReadResult ParseWav(std::string_view bytes, const WavReadOptions& options) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    throw FormatError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  uint16_t format_tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  std::string_view data;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    const uint32_t size = U32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    const size_t available = std::min<size_t>(size, bytes.size() - body);
    if (id == "fmt ") {
      if (available < 16) throw FormatError("fmt chunk too short");
      const char* f = bytes.data() + body;
      format_tag = U16(f);
      channels = U16(f + 2);
      sample_rate = U32(f + 4);
      bits = U16(f + 14);
      if (format_tag == kFormatExtensible) {
        if (available < 26) throw FormatError("extensible fmt chunk too short");
        format_tag = U16(f + 24);  // first two bytes of the SubFormat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(body, available);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw FormatError("missing fmt or data chunk");

  WavReadResult result;
  if (format_tag == kFormatPcm && bits == 16) {
    result.format = WavSampleFormat::kPcm16;
  } else if (format_tag == kFormatPcm && bits == 24) {
    result.format = WavSampleFormat::kPcm24;
  } else if (format_tag == kFormatFloat && bits == 32) {
    result.format = WavSampleFormat::kFloat32;
  } else {
    throw FormatError("unsupported WAV encoding (format " +
                      std::to_string(format_tag) + ", " + std::to_string(bits) +
                      " bits)");
  }
  if (channels == 0 || sample_rate == 0) {
    throw FormatError("WAV header has zero channels or sample rate");
  }
  if (options.channel && (*options.channel < 0 || *options.channel >= channels)) {
    throw ConfigError("channel " + std::to_string(*options.channel) +
                      " out of range for " + std::to_string(channels) +
                      "-channel file");
  }

  const size_t width = bits / 8;
  const size_t frame_bytes = width * channels;
  const size_t frames = data.size() / frame_bytes;
  result.channels = channels;
  result.downmixed = channels > 1 && !options.channel;
  result.audio.sample_rate = static_cast<int>(sample_rate);
  result.audio.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    const char* frame = data.data() + i * frame_bytes;
    double v = 0.0;
    if (options.channel) {
      v = DecodeSample(frame + width * static_cast<size_t>(*options.channel),
                       result.format);
    } else {
      for (size_t c = 0; c < channels; ++c) {
        v += DecodeSample(frame + width * c, result.format);
      }
      v /= channels;
    }
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite sample at frame " + std::to_string(i));
    }
    result.audio.samples[i] = v;
  }
  return result;
}

WavReadResult ReadWav(const std::filesystem::path& path,
                      const WavReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return ParseWav(bytes, options);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string SerializeWav(const AudioBuffer& audio, WavSampleFormat format) {
  const uint16_t bits = format == WavSampleFormat::kPcm16   ? 16
                        : format == WavSampleFormat::kPcm24 ? 24
                                                            : 32;
  const uint16_t tag =
      format == WavSampleFormat::kFloat32 ? kFormatFloat : kFormatPcm;
  const uint32_t block_align = bits / 8;
  const auto data_size =
      static_cast<uint32_t>(audio.samples.size() * block_align);

  std::string out = "RIFF";
  PutU32(out, 36 + data_size + (data_size & 1));
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, tag);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(audio.sample_rate));
  PutU32(out, static_cast<uint32_t>(audio.sample_rate) * block_align);
  PutU16(out, static_cast<uint16_t>(block_align));
  PutU16(out, bits);
  out += "data";
  PutU32(out, data_size);
  out.reserve(out.size() + data_size + 1);
  for (double s : audio.samples) {
    switch (format) {
      case WavSampleFormat::kPcm16: {
        const auto v = static_cast<int16_t>(
            std::lround(std::clamp(s, -1.0, 1.0) * 32767.0));
        PutU16(out, static_cast<uint16_t>(v));
        break;
      }
      case WavSampleFormat::kPcm24: {
        const auto v = static_cast<int32_t>(
            std::lround(std::clamp(s, -1.0, 1.0) * 8388607.0));
        out += static_cast<char>(v & 0xFF);
        out += static_cast<char>((v >> 8) & 0xFF);
        out += static_cast<char>((v >> 16) & 0xFF);
        break;
      }
      case WavSampleFormat::kFloat32: {
        const auto f = static_cast<float>(s);
        out.append(reinterpret_cast<const char*>(&f), 4);
        break;
      }
    }
  }
  if (data_size & 1) out += '\0';
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio,
              WavSampleFormat format) {
  const std::string bytes = SerializeWav(audio, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace audiodist
