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

#include "audiodist/embedding_store.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "audiodist/error.h"
#include "audiodist/parallel.h"

namespace audiodist {

namespace {

// Pairwise sum of `count` values spaced `stride` apart. Splitting down to
// single values at the exact midpoint makes the sum of a sequence stacked
// onto itself exactly twice the sum of the sequence.
double PairwiseSum(const double* p, Eigen::Index stride, Eigen::Index count) {
  if (count == 1) return p[0];
  const Eigen::Index half = count / 2;
  return PairwiseSum(p, stride, half) +
         PairwiseSum(p + half * stride, stride, count - half);
}

}  // namespace

EmbeddingSet::EmbeddingSet(RowMatrix vectors, std::string source_id)
    : vectors_(std::move(vectors)), source_id_(std::move(source_id)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) {
    throw ValidationError("embedding set '" + source_id_ +
                          "' must have at least one frame and one dimension");
  }
  for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
    for (Eigen::Index c = 0; c < vectors_.cols(); ++c) {
      if (!std::isfinite(vectors_(r, c))) {
        throw ValidationError("embedding set '" + source_id_ +
                              "' has a non-finite value at row " +
                              std::to_string(r) + ", column " +
                              std::to_string(c));
      }
    }
  }
}

EmbeddingSet LoadEmbeddings(const std::filesystem::path& path,
                            std::optional<Eigen::Index> expected_dim) {
  NpyArray array = ReadNpy(path);
  const Eigen::Index rows =
      array.shape.size() == 1 ? 1 : static_cast<Eigen::Index>(array.shape[0]);
  const Eigen::Index cols = static_cast<Eigen::Index>(array.shape.back());
  RowMatrix m = Eigen::Map<const RowMatrix>(array.data.data(), rows, cols);
  if (expected_dim && cols != *expected_dim) {
    throw ShapeError(path.string() + ": embedding dim " + std::to_string(cols) +
                     " != expected " + std::to_string(*expected_dim));
  }
  try {
    return EmbeddingSet(std::move(m), path.stem().string());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

EmbeddingSet LoadCorpus(const std::filesystem::path& path,
                        std::optional<Eigen::Index> expected_dim) {
  if (!std::filesystem::is_directory(path)) {
    if (!std::filesystem::exists(path)) {
      throw IoError("no such file or directory: " + path.string());
    }
    return LoadEmbeddings(path, expected_dim);
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".npy") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw IoError("corpus directory has no .npy files: " + path.string());
  }
  std::vector<std::optional<EmbeddingSet>> loaded(files.size());
  ParallelFor(files.size(), [&](size_t i) {
    loaded[i].emplace(LoadEmbeddings(files[i], expected_dim));
  });
  std::vector<EmbeddingSet> sets;
  sets.reserve(loaded.size());
  for (auto& s : loaded) sets.push_back(std::move(*s));
  EmbeddingSet all = Concat(sets);
  return EmbeddingSet(all.vectors(), path.filename().string());
}

void SaveEmbeddings(const std::filesystem::path& path, const EmbeddingSet& e,
                    NpyDtype dtype) {
  const std::vector<size_t> shape = {static_cast<size_t>(e.n_frames()),
                                     static_cast<size_t>(e.dim())};
  WriteNpy(path, std::span<const double>(e.vectors().data(), e.vectors().size()),
           shape, dtype);
}

EmbeddingSet Concat(std::span<const EmbeddingSet> sets) {
  if (sets.empty()) throw ConfigError("concat of an empty list of sets");
  const Eigen::Index dim = sets.front().dim();
  Eigen::Index rows = 0;
  for (const auto& s : sets) {
    if (s.dim() != dim) {
      throw ShapeError("cannot concat sets of dim " + std::to_string(dim) +
                       " and " + std::to_string(s.dim()) + " ('" +
                       s.source_id() + "')");
    }
    rows += s.n_frames();
  }
  RowMatrix out(rows, dim);
  Eigen::Index at = 0;
  for (const auto& s : sets) {
    out.middleRows(at, s.n_frames()) = s.vectors();
    at += s.n_frames();
  }
  return EmbeddingSet(std::move(out), sets.front().source_id());
}

GaussianStats ComputeStats(const EmbeddingSet& e, int ddof) {
  const Eigen::Index n = e.n_frames();
  if (n < 2 || n <= ddof) {
    throw InsufficientSamplesError(
        "embedding set '" + e.source_id() + "' has " + std::to_string(n) +
        " frame(s); covariance needs at least 2");
  }
  GaussianStats stats;
  stats.n_frames = n;
  // Mean as first frame plus the mean offset from it: exact for constant
  // columns.
  const Eigen::RowVectorXd first = e.vectors().row(0);
  const RowMatrix offsets = e.vectors().rowwise() - first;
  stats.mean.resize(e.dim());
  for (Eigen::Index c = 0; c < e.dim(); ++c) {
    stats.mean(c) = first(c) + PairwiseSum(offsets.data() + c, e.dim(), n) /
                                   static_cast<double>(n);
  }
  const RowMatrix centered = e.vectors().rowwise() - stats.mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered;
  cov /= static_cast<double>(n - ddof);
  stats.cov = 0.5 * (cov + cov.transpose());
  return stats;
}

}  // namespace audiodist
