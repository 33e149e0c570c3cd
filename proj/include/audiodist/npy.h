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

#ifndef AUDIODIST_NPY_H_
#define AUDIODIST_NPY_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace audiodist {

enum class NpyDtype { kFloat32, kFloat64 };

// A dense C-order array decoded from the NPY container. Values are widened
// to double on read; float32 -> double -> float32 is lossless.
struct NpyArray {
  std::vector<size_t> shape;
  std::vector<double> data;
  NpyDtype dtype = NpyDtype::kFloat32;
};

// Accepts format versions 1.0, 2.0 and 3.0 with little-endian '<f4'/'<f8'
// payloads (or their native-order '=' spelling). Throws FormatError.
NpyArray ParseNpy(std::string_view bytes);
NpyArray ReadNpy(const std::filesystem::path& path);

// Writes a version 1.0 file. shape.size() must be 1 or 2 and its product
// must equal data.size().
std::string SerializeNpy(std::span<const double> data,
                         std::span<const size_t> shape,
                         NpyDtype dtype = NpyDtype::kFloat32);
void WriteNpy(const std::filesystem::path& path, std::span<const double> data,
              std::span<const size_t> shape,
              NpyDtype dtype = NpyDtype::kFloat32);

}  // namespace audiodist

#endif  // AUDIODIST_NPY_H_
