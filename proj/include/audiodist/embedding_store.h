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

#ifndef AUDIODIST_EMBEDDING_STORE_H_
#define AUDIODIST_EMBEDDING_STORE_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "audiodist/npy.h"

namespace audiodist {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Denominator offset for the sample covariance: n - kCovarianceDdof.
// 1 gives the unbiased estimator; pass 0 to ComputeStats for the biased one.
inline constexpr int kCovarianceDdof = 1;

// A sequence of embedding vectors, one row per frame. Immutable once built;
// the constructor enforces n_frames >= 1, dim >= 1 and all-finite entries.
class EmbeddingSet {
 public:
  EmbeddingSet(RowMatrix vectors, std::string source_id);

  const RowMatrix& vectors() const { return vectors_; }
  Eigen::Index n_frames() const { return vectors_.rows(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  const std::string& source_id() const { return source_id_; }

 private:
  RowMatrix vectors_;
  std::string source_id_;
};

// Mean vector and covariance matrix of an EmbeddingSet.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int64_t n_frames = 0;

  Eigen::Index dim() const { return mean.size(); }
};

// Reads an NPY file. A 1-D array of length d becomes a single 1 x d frame.
// Throws FormatError, ValidationError (non-finite entry, naming the row) or
// ShapeError when expected_dim is given and differs.
EmbeddingSet LoadEmbeddings(const std::filesystem::path& path,
                            std::optional<Eigen::Index> expected_dim = {});

// A file is loaded as-is; a directory is treated as a corpus of `*.npy`
// files, loaded in filename order and concatenated.
EmbeddingSet LoadCorpus(const std::filesystem::path& path,
                        std::optional<Eigen::Index> expected_dim = {});

void SaveEmbeddings(const std::filesystem::path& path, const EmbeddingSet& e,
                    NpyDtype dtype = NpyDtype::kFloat32);

// Stacks frames in input order. Throws ConfigError on empty input and
// ShapeError on mixed dims.
EmbeddingSet Concat(std::span<const EmbeddingSet> sets);

// Arithmetic mean and (C + C^T)/2-symmetrized sample covariance with
// denominator n_frames - ddof. Throws InsufficientSamplesError unless
// n_frames > ddof and n_frames >= 2.
GaussianStats ComputeStats(const EmbeddingSet& e, int ddof = kCovarianceDdof);

}  // namespace audiodist

#endif  // AUDIODIST_EMBEDDING_STORE_H_
