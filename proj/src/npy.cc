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

#include "audiodist/npy.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "audiodist/error.h"

namespace audiodist {

static_assert(std::endian::native == std::endian::little,
              "NPY codec assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr size_t kMagicSize = 6;

size_t ElementSize(NpyDtype dtype) {
  return dtype == NpyDtype::kFloat32 ? 4 : 8;
}

NpyDtype ParseDescr(const std::string& header) {
  static const std::regex kDescr(R"('descr'\s*:\s*'([^']*)')");
  std::smatch m;
  if (!std::regex_search(header, m, kDescr)) {
    throw FormatError("npy header has no 'descr' entry");
  }
  const std::string descr = m[1];
  if (descr == "<f4" || descr == "=f4") return NpyDtype::kFloat32;
  if (descr == "<f8" || descr == "=f8") return NpyDtype::kFloat64;
  throw FormatError("unsupported npy dtype '" + descr +
                    "' (expected little-endian float32 or float64)");
}

bool ParseFortranOrder(const std::string& header) {
  static const std::regex kOrder(R"('fortran_order'\s*:\s*(True|False))");
  std::smatch m;
  if (!std::regex_search(header, m, kOrder)) {
    throw FormatError("npy header has no 'fortran_order' entry");
  }
  return m[1] == "True";
}

std::vector<size_t> ParseShape(const std::string& header) {
  static const std::regex kShape(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  if (!std::regex_search(header, m, kShape)) {
    throw FormatError("npy header has no 'shape' entry");
  }
  std::vector<size_t> shape;
  std::stringstream ss(m[1].str());
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = token.find_last_not_of(" \t");
    token = token.substr(first, last - first + 1);
    size_t value = 0;
    for (char c : token) {
      if (c < '0' || c > '9') {
        throw FormatError("malformed npy shape entry '" + token + "'");
      }
      value = value * 10 + static_cast<size_t>(c - '0');
    }
    shape.push_back(value);
  }
  return shape;
}

template <typename T>
T ReadLe(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

NpyArray ParseNpy(std::string_view bytes) {
  if (bytes.size() < kMagicSize + 4 ||
      std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    throw FormatError("not an npy file (bad magic)");
  }
  const auto major = static_cast<uint8_t>(bytes[6]);
  size_t header_len = 0;
  size_t header_start = 0;
  if (major == 1) {
    header_len = ReadLe<uint16_t>(bytes.data() + 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw FormatError("truncated npy header");
    header_len = ReadLe<uint32_t>(bytes.data() + 8);
    header_start = 12;
  } else {
    throw FormatError("unsupported npy format version " +
                      std::to_string(major));
  }
  if (bytes.size() < header_start + header_len) {
    throw FormatError("truncated npy header");
  }
  const std::string header(bytes.substr(header_start, header_len));

  NpyArray array;
  array.dtype = ParseDescr(header);
  if (ParseFortranOrder(header)) {
    throw FormatError("Fortran-order npy arrays are not supported");
  }
  array.shape = ParseShape(header);
  if (array.shape.empty() || array.shape.size() > 2) {
    throw FormatError("npy array must be 1-D or 2-D, got " +
                      std::to_string(array.shape.size()) + "-D");
  }
  size_t count = 1;
  for (size_t s : array.shape) count *= s;

  const size_t elem = ElementSize(array.dtype);
  const size_t data_start = header_start + header_len;
  if (bytes.size() - data_start < count * elem) {
    throw FormatError("npy payload truncated: expected " +
                      std::to_string(count * elem) + " bytes");
  }
  array.data.resize(count);
  const char* p = bytes.data() + data_start;
  if (array.dtype == NpyDtype::kFloat32) {
    for (size_t i = 0; i < count; ++i) array.data[i] = ReadLe<float>(p + 4 * i);
  } else {
    for (size_t i = 0; i < count; ++i) array.data[i] = ReadLe<double>(p + 8 * i);
  }
  return array;
}

NpyArray ReadNpy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return ParseNpy(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string SerializeNpy(std::span<const double> data,
                         std::span<const size_t> shape, NpyDtype dtype) {
  if (shape.empty() || shape.size() > 2) {
    throw ShapeError("npy writer supports 1-D or 2-D arrays only");
  }
  size_t count = 1;
  for (size_t s : shape) count *= s;
  if (count != data.size()) {
    throw ShapeError("npy shape does not match data length");
  }

  std::string dict = "{'descr': '";
  dict += dtype == NpyDtype::kFloat32 ? "<f4" : "<f8";
  dict += "', 'fortran_order': False, 'shape': (";
  dict += std::to_string(shape[0]);
  if (shape.size() == 1) {
    dict += ",";
  } else {
    dict += ", " + std::to_string(shape[1]);
  }
  dict += "), }";
  // Preamble + header is padded with spaces to a multiple of 64 bytes and
  // terminated by a newline.
  const size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';

  std::string out(kMagic, kMagicSize);
  out += static_cast<char>(1);
  out += static_cast<char>(0);
  const auto header_len = static_cast<uint16_t>(dict.size());
  out.append(reinterpret_cast<const char*>(&header_len), 2);
  out += dict;

  const size_t elem = ElementSize(dtype);
  const size_t offset = out.size();
  out.resize(offset + count * elem);
  char* p = out.data() + offset;
  for (size_t i = 0; i < count; ++i) {
    if (dtype == NpyDtype::kFloat32) {
      const auto v = static_cast<float>(data[i]);
      std::memcpy(p + 4 * i, &v, 4);
    } else {
      std::memcpy(p + 8 * i, &data[i], 8);
    }
  }
  return out;
}

void WriteNpy(const std::filesystem::path& path, std::span<const double> data,
              std::span<const size_t> shape, NpyDtype dtype) {
  const std::string bytes = SerializeNpy(data, shape, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace audiodist
