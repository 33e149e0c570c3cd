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

#include "audiodist/distance.h"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "audiodist/error.h"
#include "audiodist/parallel.h"
#include "audiodist/random.h"

namespace audiodist {

namespace {

constexpr Eigen::Index kRowBlock = 64;

Eigen::Index BlockCount(Eigen::Index rows) {
  return (rows + kRowBlock - 1) / kRowBlock;
}

double SqDist(const double* a, const double* b, Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

void CheckSameDim(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.dim() != b.dim()) {
    throw ShapeError("embedding dim mismatch: '" + a.source_id() + "' has " +
                     std::to_string(a.dim()) + ", '" + b.source_id() +
                     "' has " + std::to_string(b.dim()));
  }
}

// Clamps rounding-level negative eigenvalues to 0 and rejects the rest.
void ClampEigenvalues(Eigen::VectorXd& values) {
  const double lambda_max = std::max(values.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] >= 0.0) continue;
    if (values[i] < -kEigenClamp * lambda_max) {
      throw NumericalError("matrix is not positive semidefinite (eigenvalue " +
                           std::to_string(values[i]) + ")");
    }
    values[i] = 0.0;
  }
}

Eigen::MatrixXd Symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

EmbeddingSet CapFrames(const EmbeddingSet& e, size_t max_frames, uint64_t seed,
                       uint64_t stream) {
  const auto n = static_cast<size_t>(e.n_frames());
  if (max_frames == 0 || n <= max_frames) return e;
  Rng rng = MakeStream(seed, stream);
  std::vector<size_t> idx = SampleWithoutReplacement(rng, n, max_frames);
  std::sort(idx.begin(), idx.end());
  RowMatrix rows(static_cast<Eigen::Index>(idx.size()), e.dim());
  for (size_t i = 0; i < idx.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) =
        e.vectors().row(static_cast<Eigen::Index>(idx[i]));
  }
  return EmbeddingSet(std::move(rows), e.source_id());
}

// Sum of k(a_i, b_j) over all i, j, or over i < j when `upper_only` (a == b).
// Per-block partial sums are reduced in block order.
double KernelSum(const RowMatrix& a, const RowMatrix& b, double sigma,
                 bool upper_only) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  const Eigen::Index dim = a.cols();
  const double two_sigma_sq = 2.0 * sigma * sigma;
  const Eigen::Index blocks = BlockCount(n);
  std::vector<double> partial(static_cast<size_t>(blocks), 0.0);
  ParallelFor(static_cast<size_t>(blocks), [&](size_t block) {
    const Eigen::Index begin = static_cast<Eigen::Index>(block) * kRowBlock;
    const Eigen::Index end = std::min(n, begin + kRowBlock);
    double acc = 0.0;
    for (Eigen::Index i = begin; i < end; ++i) {
      const double* ai = a.data() + i * dim;
      for (Eigen::Index j = upper_only ? i + 1 : 0; j < m; ++j) {
        acc += std::exp(-SqDist(ai, b.data() + j * dim, dim) / two_sigma_sq);
      }
    }
    partial[block] = acc;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kFad:
      return "fad";
    case Metric::kFadInfinity:
      return "fad_infinity";
    case Metric::kMmdScaled:
      return "mmd_scaled";
  }
  return "unknown";
}

std::string_view BandwidthModeName(BandwidthMode mode) {
  return mode == BandwidthMode::kFixed ? "fixed" : "median_heuristic";
}

void RbfKernelConfig::Validate() const {
  if (bandwidth_mode == BandwidthMode::kFixed &&
      !(sigma > 0.0 && std::isfinite(sigma))) {
    throw ConfigError("fixed RBF bandwidth must be positive and finite, got " +
                      std::to_string(sigma));
  }
  if (!(alpha > 0.0 && std::isfinite(alpha))) {
    throw ConfigError("MMD scale alpha must be positive and finite");
  }
  if (max_frames == 1) {
    throw ConfigError("MMD frame cap must be 0 (off) or at least 2");
  }
}

Eigen::MatrixXd MatrixSqrtPsd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix square root needs a square matrix");
  const double scale = m.norm();
  if (scale == 0.0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  if ((m - m.transpose()).norm() > kSymmetryTolerance * scale) {
    throw ValidationError("matrix square root input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Symmetrized(m));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition did not converge");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  ClampEigenvalues(values);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::MatrixXd s =
      v * values.cwiseSqrt().asDiagonal() * v.transpose();
  return Symmetrized(s);
}

DistanceResult FrechetFromStats(const GaussianStats& sx, const GaussianStats& sy,
                                const FrechetOptions& options) {
  if (sx.dim() != sy.dim()) {
    throw ShapeError("Gaussian stats dim mismatch: " + std::to_string(sx.dim()) +
                     " vs " + std::to_string(sy.dim()));
  }
  if (options.ridge < 0.0) throw ConfigError("covariance ridge must be >= 0");
  Eigen::MatrixXd cov_x = sx.cov;
  Eigen::MatrixXd cov_y = sy.cov;
  if (options.ridge > 0.0) {
    cov_x.diagonal().array() += options.ridge;
    cov_y.diagonal().array() += options.ridge;
  }

  const double mean_term = (sx.mean - sy.mean).squaredNorm();
  // tr sqrt(S_x^(1/2) S_y S_x^(1/2)) is the nuclear norm of S_x^(1/2) S_y^(1/2).
  const Eigen::MatrixXd root_x = MatrixSqrtPsd(cov_x);
  const Eigen::MatrixXd root_y = MatrixSqrtPsd(cov_y);
  const Eigen::MatrixXd product = root_x * root_y;
  double cross_trace = 0.0;
  if (product.norm() > 0.0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(product);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("singular value decomposition did not converge");
    }
    cross_trace = svd.singularValues().sum();
  }

  const double trace_sum = cov_x.trace() + cov_y.trace();
  double value = mean_term + trace_sum - 2.0 * cross_trace;
  if (value < 0.0) {
    if (value < -kFrechetNegativeSlack * std::max(1.0, trace_sum)) {
      throw NumericalError("Frechet distance is negative beyond rounding: " +
                           std::to_string(value));
    }
    value = 0.0;
  }
  DistanceResult result;
  result.value = value;
  result.metric = Metric::kFad;
  result.n_frames_x = sx.n_frames;
  result.n_frames_y = sy.n_frames;
  return result;
}

DistanceResult Fad(const EmbeddingSet& x, const EmbeddingSet& y,
                   const FrechetOptions& options) {
  CheckSameDim(x, y);
  return FrechetFromStats(ComputeStats(x), ComputeStats(y), options);
}

std::vector<int64_t> DefaultSubsampleSizes(int64_t n_frames, int count) {
  std::vector<int64_t> sizes;
  if (n_frames < 2 || count < 1) return sizes;
  const double lo = std::max<double>(2.0, static_cast<double>(n_frames) / 10.0);
  const double hi = static_cast<double>(n_frames);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    const double s = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
    const auto rounded = std::clamp<int64_t>(std::llround(s), 2, n_frames);
    if (sizes.empty() || sizes.back() != rounded) sizes.push_back(rounded);
  }
  return sizes;
}

FadInfinityFit FitFadInfinity(const EmbeddingSet& x, const EmbeddingSet& y,
                              const FadInfinityConfig& config) {
  CheckSameDim(x, y);
  std::vector<int64_t> sizes =
      config.subsample_sizes.empty()
          ? DefaultSubsampleSizes(y.n_frames(), config.default_size_count)
          : config.subsample_sizes;
  if (std::set<int64_t>(sizes.begin(), sizes.end()).size() < 3) {
    throw ConfigError("FAD-infinity needs at least 3 distinct subsample sizes");
  }
  if (config.draws_per_size < 1) {
    throw ConfigError("FAD-infinity needs at least one draw per size");
  }
  for (int64_t s : sizes) {
    if (s < 2 || s > y.n_frames()) {
      throw ConfigError("subsample size " + std::to_string(s) +
                        " outside [2, " + std::to_string(y.n_frames()) + "]");
    }
  }

  const GaussianStats stats_x = ComputeStats(x);
  const auto draws = static_cast<size_t>(config.draws_per_size);
  std::vector<double> values(sizes.size() * draws);
  ParallelFor(values.size(), [&](size_t task) {
    const auto s = static_cast<size_t>(sizes[task / draws]);
    Rng rng = MakeStream(config.seed, task);
    std::vector<size_t> idx =
        SampleWithoutReplacement(rng, static_cast<size_t>(y.n_frames()), s);
    std::sort(idx.begin(), idx.end());
    RowMatrix rows(static_cast<Eigen::Index>(s), y.dim());
    for (size_t i = 0; i < s; ++i) {
      rows.row(static_cast<Eigen::Index>(i)) =
          y.vectors().row(static_cast<Eigen::Index>(idx[i]));
    }
    const EmbeddingSet subset(std::move(rows), y.source_id());
    values[task] =
        FrechetFromStats(stats_x, ComputeStats(subset), config.frechet).value;
  });

  FadInfinityFit fit;
  fit.sizes = sizes;
  for (size_t i = 0; i < sizes.size(); ++i) {
    double acc = 0.0;
    for (size_t d = 0; d < draws; ++d) acc += values[i * draws + d];
    fit.mean_fad.push_back(acc / static_cast<double>(draws));
  }

  // Ordinary least squares of mean FAD against 1/s.
  const auto k = static_cast<double>(sizes.size());
  double mean_inv = 0.0;
  double mean_fad = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    mean_inv += 1.0 / static_cast<double>(sizes[i]);
    mean_fad += fit.mean_fad[i];
  }
  mean_inv /= k;
  mean_fad /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const double dx = 1.0 / static_cast<double>(sizes[i]) - mean_inv;
    sxx += dx * dx;
    sxy += dx * (fit.mean_fad[i] - mean_fad);
  }
  fit.slope = sxy / sxx;
  fit.result.value = mean_fad - fit.slope * mean_inv;
  fit.result.metric = Metric::kFadInfinity;
  fit.result.n_frames_x = x.n_frames();
  fit.result.n_frames_y = y.n_frames();
  return fit;
}

DistanceResult FadInfinity(const EmbeddingSet& x, const EmbeddingSet& y,
                           const FadInfinityConfig& config) {
  return FitFadInfinity(x, y, config).result;
}

Eigen::MatrixXd PairwiseSqDists(const EmbeddingSet& a, const EmbeddingSet& b) {
  CheckSameDim(a, b);
  const Eigen::Index n = a.n_frames();
  const Eigen::Index m = b.n_frames();
  const Eigen::Index dim = a.dim();
  Eigen::MatrixXd out(n, m);
  ParallelFor(static_cast<size_t>(BlockCount(n)), [&](size_t block) {
    const Eigen::Index begin = static_cast<Eigen::Index>(block) * kRowBlock;
    const Eigen::Index end = std::min(n, begin + kRowBlock);
    for (Eigen::Index i = begin; i < end; ++i) {
      const double* ai = a.vectors().data() + i * dim;
      for (Eigen::Index j = 0; j < m; ++j) {
        out(i, j) = std::max(0.0, SqDist(ai, b.vectors().data() + j * dim, dim));
      }
    }
  });
  return out;
}

double MedianHeuristicBandwidth(const EmbeddingSet& x, const EmbeddingSet& y) {
  CheckSameDim(x, y);
  const std::array<EmbeddingSet, 2> both = {x, y};
  const EmbeddingSet combined = Concat(both);
  const RowMatrix& z = combined.vectors();
  const size_t n = static_cast<size_t>(z.rows());
  if (n < 2) throw InsufficientSamplesError("median heuristic needs 2 frames");
  const Eigen::Index dim = z.cols();

  // Row i owns pairs (i, j > i), stored contiguously from offset(i).
  std::vector<double> dists(n * (n - 1) / 2);
  ParallelFor(n - 1, [&](size_t i) {
    size_t at = i * (2 * n - i - 1) / 2;
    const double* zi = z.data() + static_cast<Eigen::Index>(i) * dim;
    for (size_t j = i + 1; j < n; ++j) {
      dists[at++] =
          std::sqrt(SqDist(zi, z.data() + static_cast<Eigen::Index>(j) * dim, dim));
    }
  });

  const double mean =
      std::accumulate(dists.begin(), dists.end(), 0.0) /
      static_cast<double>(dists.size());
  const size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), dists.begin() + mid);
    median = 0.5 * (lower + median);
  }
  if (median > 0.0) return median;
  if (mean > 0.0) return mean;
  throw DegenerateBandwidthError(
      "all frames are identical; median-heuristic bandwidth is 0");
}

DistanceResult MmdScaled(const EmbeddingSet& x, const EmbeddingSet& y,
                         const RbfKernelConfig& kernel) {
  kernel.Validate();
  CheckSameDim(x, y);
  const EmbeddingSet xc = CapFrames(x, kernel.max_frames, kernel.seed, 0);
  const EmbeddingSet yc = CapFrames(y, kernel.max_frames, kernel.seed, 1);
  const auto n = static_cast<double>(xc.n_frames());
  const auto m = static_cast<double>(yc.n_frames());
  if (xc.n_frames() < 2 || yc.n_frames() < 2) {
    const EmbeddingSet& bad = xc.n_frames() < 2 ? xc : yc;
    throw InsufficientSamplesError("MMD needs at least 2 frames per set; '" +
                                   bad.source_id() + "' has " +
                                   std::to_string(bad.n_frames()));
  }
  const double sigma = kernel.bandwidth_mode == BandwidthMode::kFixed
                           ? kernel.sigma
                           : MedianHeuristicBandwidth(xc, yc);

  const double kxx = 2.0 * KernelSum(xc.vectors(), xc.vectors(), sigma, true);
  const double kyy = 2.0 * KernelSum(yc.vectors(), yc.vectors(), sigma, true);
  const double kxy = KernelSum(xc.vectors(), yc.vectors(), sigma, false);
  const double mmd2 =
      kxx / (n * (n - 1.0)) + kyy / (m * (m - 1.0)) - 2.0 * kxy / (n * m);

  DistanceResult result;
  result.value = kernel.alpha * mmd2;
  result.metric = Metric::kMmdScaled;
  result.sigma_used = sigma;
  result.n_frames_x = xc.n_frames();
  result.n_frames_y = yc.n_frames();
  return result;
}

std::vector<SigmaSweepEntry> MmdSigmaSweep(const EmbeddingSet& x,
                                           const EmbeddingSet& y,
                                           const RbfKernelConfig& base,
                                           std::span<const double> sigmas) {
  std::vector<SigmaSweepEntry> out;
  RbfKernelConfig k = base;
  k.bandwidth_mode = BandwidthMode::kFixed;
  for (double sigma : sigmas) {
    k.sigma = sigma;
    out.push_back({BandwidthMode::kFixed, MmdScaled(x, y, k)});
  }
  k.bandwidth_mode = BandwidthMode::kMedianHeuristic;
  out.push_back({BandwidthMode::kMedianHeuristic, MmdScaled(x, y, k)});
  return out;
}

}  // namespace audiodist
