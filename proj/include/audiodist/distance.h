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

#ifndef AUDIODIST_DISTANCE_H_
#define AUDIODIST_DISTANCE_H_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "audiodist/embedding_store.h"

namespace audiodist {

enum class BandwidthMode { kMedianHeuristic, kFixed };

enum class Metric { kFad, kFadInfinity, kMmdScaled };

std::string_view MetricName(Metric metric);
std::string_view BandwidthModeName(BandwidthMode mode);

// Gaussian RBF kernel k(a, b) = exp(-|a - b|^2 / (2 sigma^2)) with the MMD
// scale factor alpha.
struct RbfKernelConfig {
  BandwidthMode bandwidth_mode = BandwidthMode::kMedianHeuristic;
  // Used only in kFixed mode.
  double sigma = 1.0;
  double alpha = 1000.0;
  // When nonzero, each set is randomly reduced to at most this many frames
  // (seeded) before the O(n^2) kernel and bandwidth computations.
  size_t max_frames = 0;
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct DistanceResult {
  double value = 0.0;
  Metric metric = Metric::kFad;
  std::optional<double> sigma_used;
  int64_t n_frames_x = 0;
  int64_t n_frames_y = 0;
};

struct FrechetOptions {
  // Optional ridge added to both covariances. 0 reproduces the plain formula.
  double ridge = 0.0;
};

// Relative tolerance for the symmetry check of MatrixSqrtPsd's input.
inline constexpr double kSymmetryTolerance = 1e-10;
// Eigenvalues in [-kEigenClamp * lambda_max, 0) are rounding noise and are
// set to 0; anything more negative means the input is not PSD.
inline constexpr double kEigenClamp = 1e-8;
// Negative Frechet values down to -kFrechetNegativeSlack * max(1, tr S_x + tr S_y)
// are rounded to 0.
inline constexpr double kFrechetNegativeSlack = 1e-6;

// Principal square root S of a symmetric PSD matrix (S * S == m), via the
// symmetric eigendecomposition. Throws ValidationError if m is not symmetric
// and NumericalError if the eigensolver fails or m is clearly indefinite.
Eigen::MatrixXd MatrixSqrtPsd(const Eigen::MatrixXd& m);

// Squared Frechet distance between two Gaussians:
//   |mu_x - mu_y|^2 + tr(S_x + S_y - 2 (S_x S_y)^(1/2)),
// where the cross term tr sqrt(S_x^(1/2) S_y S_x^(1/2)) is evaluated as the sum
// of singular values of S_x^(1/2) S_y^(1/2).
DistanceResult FrechetFromStats(const GaussianStats& sx, const GaussianStats& sy,
                                const FrechetOptions& options = {});

// FAD score of two embedding sets (the squared form above).
DistanceResult Fad(const EmbeddingSet& x, const EmbeddingSet& y,
                   const FrechetOptions& options = {});

struct FadInfinityConfig {
  // Empty selects DefaultSubsampleSizes(y.n_frames(), default_size_count).
  std::vector<int64_t> subsample_sizes;
  int draws_per_size = 10;
  int default_size_count = 5;
  uint64_t seed = 0;
  FrechetOptions frechet;
};

struct FadInfinityFit {
  DistanceResult result;
  std::vector<int64_t> sizes;
  // Mean FAD over the draws at each size.
  std::vector<double> mean_fad;
  double slope = 0.0;
};

// `count` sizes, logarithmically spaced between max(2, n/10) and n,
// rounded and deduplicated.
std::vector<int64_t> DefaultSubsampleSizes(int64_t n_frames, int count = 5);

// FAD extrapolated to an infinitely large test set: FAD(x, random subset of
// y of size s) is averaged over draws for each s, an ordinary least-squares
// line in 1/s is fitted, and its intercept is returned.
FadInfinityFit FitFadInfinity(const EmbeddingSet& x, const EmbeddingSet& y,
                              const FadInfinityConfig& config = {});
DistanceResult FadInfinity(const EmbeddingSet& x, const EmbeddingSet& y,
                           const FadInfinityConfig& config = {});

// D(i, j) = |a_i - b_j|^2, accumulated coordinate by coordinate in index
// order and clamped at 0. Throws ShapeError on dim mismatch.
Eigen::MatrixXd PairwiseSqDists(const EmbeddingSet& a, const EmbeddingSet& b);

// Median Euclidean distance over all unordered pairs of distinct frames of
// the combined set x u y. Falls back to the mean pairwise distance when the
// median is 0; throws DegenerateBandwidthError when that is 0 too.
double MedianHeuristicBandwidth(const EmbeddingSet& x, const EmbeddingSet& y);

// Scaled unbiased MMD estimate alpha * MMD_u^2 with the RBF kernel. May be
// negative; the value is never clamped. Frame counts in the result are those
// used after the optional cap.
DistanceResult MmdScaled(const EmbeddingSet& x, const EmbeddingSet& y,
                         const RbfKernelConfig& kernel = {});

inline constexpr double kSweepSigmas[] = {1.0, 10.0, 100.0, 1000.0, 10000.0};

struct SigmaSweepEntry {
  BandwidthMode mode;
  DistanceResult result;
};

// MMD at each fixed sigma (default kSweepSigmas) followed by the
// median-heuristic bandwidth, all with the same alpha and frame cap.
std::vector<SigmaSweepEntry> MmdSigmaSweep(
    const EmbeddingSet& x, const EmbeddingSet& y, const RbfKernelConfig& base,
    std::span<const double> sigmas = kSweepSigmas);

}  // namespace audiodist

#endif  // AUDIODIST_DISTANCE_H_
