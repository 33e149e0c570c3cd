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

#include "audiodist/random.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace audiodist {

Rng MakeStream(uint64_t seed, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return Rng(seq);
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double UniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

double LogUniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(UniformReal(rng, std::log(lo), std::log(hi)));
}

uint64_t UniformBelow(Rng& rng, uint64_t n) {
  // Reject the top partial bucket so every residue is equally likely.
  const uint64_t limit = Rng::max() - Rng::max() % n;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

int64_t Poisson(Rng& rng, double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson mean must be finite and >= 0");
  }
  constexpr double kPieceMean = 16.0;
  int64_t total = 0;
  while (mean > 0.0) {
    const double piece = std::min(mean, kPieceMean);
    mean -= piece;
    const double u = Uniform01(rng);
    double p = std::exp(-piece);
    double cdf = p;
    int64_t k = 0;
    // The cap bounds the loop when u lands in the rounding gap near 1.
    while (u >= cdf && k < 1000) {
      ++k;
      p *= piece / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

std::vector<size_t> SampleWithoutReplacement(Rng& rng, size_t n, size_t k) {
  if (k > n) throw std::invalid_argument("sample larger than population");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(UniformBelow(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace audiodist
