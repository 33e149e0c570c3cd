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

#ifndef AUDIODIST_MEL_H_
#define AUDIODIST_MEL_H_

#include <Eigen/Core>
#include <string>

#include "audiodist/embedding_store.h"
#include "audiodist/wav.h"

namespace audiodist {

// Log-mel front end. Defaults: 2048-point Hann STFT, hop 512, 128 HTK mel
// bands over [0, Nyquist], magnitude (not power) spectra, log floor 1e-5.
struct MelConfig {
  int sample_rate = 48000;
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 128;
  double f_min = 0.0;
  // <= 0 means sample_rate / 2.
  double f_max = 0.0;
  double log_floor = 1e-5;
  // Mel-loss only: sum the loss over n_fft in {512, 1024, 2048}, hop n_fft/4.
  bool multiscale = false;

  double ResolvedFMax() const;
  // Throws ConfigError.
  void Validate() const;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular HTK-mel filterbank, n_mels x (n_fft/2 + 1). A band too narrow
// to contain any FFT bin centre gets unit weight on the bin nearest its
// centre, so no row is all zero.
Eigen::MatrixXd MelFilterbank(const MelConfig& config);

// Periodic Hann window of length n.
Eigen::VectorXd HannWindow(int n);

// Magnitude spectra, frames x (n_fft/2 + 1), with
// floor((len - n_fft) / hop) + 1 frames. Throws ValidationError when the
// buffer is shorter than n_fft.
RowMatrix StftMagnitude(const AudioBuffer& audio, const MelConfig& config);

// log(mel magnitude + log_floor), frames x n_mels. Throws ConfigError on a
// sample-rate mismatch; inputs are never resampled.
RowMatrix LogMelSpectrogram(const AudioBuffer& audio, const MelConfig& config);

EmbeddingSet MelEmbed(const AudioBuffer& audio, const MelConfig& config,
                      std::string source_id = "mel");

// Mean absolute difference of the two log-mel matrices (summed over scales
// when config.multiscale). Throws ShapeError on length mismatch.
double MelLoss(const AudioBuffer& a, const AudioBuffer& b,
               const MelConfig& config);

}  // namespace audiodist

#endif  // AUDIODIST_MEL_H_
