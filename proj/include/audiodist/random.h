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

#ifndef AUDIODIST_RANDOM_H_
#define AUDIODIST_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace audiodist {

// Seeded sampling helpers. Only the engine comes from <random>: the standard
// distributions are implementation-defined, so every transform here is
// spelled out to keep seeded output identical across standard libraries.

using Rng = std::mt19937_64;

// Independent stream for (seed, index), e.g. one per excerpt or per draw.
Rng MakeStream(uint64_t seed, uint64_t index = 0);

// Uniform on [0, 1) with 53 random bits.
double Uniform01(Rng& rng);

double UniformReal(Rng& rng, double lo, double hi);

// Log-uniform on [lo, hi]; lo == hi returns lo. Requires 0 < lo <= hi.
double LogUniform(Rng& rng, double lo, double hi);

// Uniform integer on [0, n), n >= 1, unbiased (rejection sampling).
uint64_t UniformBelow(Rng& rng, uint64_t n);

// Poisson-distributed count with the given mean (>= 0). Sequential-search
// inversion; means above 16 are split into a sum of independent pieces.
int64_t Poisson(Rng& rng, double mean);

// Fisher-Yates shuffle.
template <typename T>
void Shuffle(Rng& rng, std::span<T> values) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(UniformBelow(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

// k distinct indices from [0, n) in random order (partial Fisher-Yates).
std::vector<size_t> SampleWithoutReplacement(Rng& rng, size_t n, size_t k);

}  // namespace audiodist

#endif  // AUDIODIST_RANDOM_H_
