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

#include "audiodist/mel.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "audiodist/error.h"

namespace audiodist {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        in_(fftw_alloc_real(static_cast<size_t>(n))),
        out_(fftw_alloc_complex(static_cast<size_t>(n / 2 + 1))) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw NumericalError("FFTW planning failed");
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  // Writes |X_k| for k = 0..n/2 into `magnitude`.
  template <typename Row>
  void Magnitude(Row&& magnitude) {
    fftw_execute(plan_);
    for (int k = 0; k <= n_ / 2; ++k) {
      magnitude[k] = std::hypot(out_[k][0], out_[k][1]);
    }
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

MelConfig WithScale(const MelConfig& config, int n_fft) {
  MelConfig c = config;
  c.n_fft = n_fft;
  c.hop = n_fft / 4;
  c.multiscale = false;
  return c;
}

double SingleScaleMelLoss(const AudioBuffer& a, const AudioBuffer& b,
                          const MelConfig& config) {
  const RowMatrix la = LogMelSpectrogram(a, config);
  const RowMatrix lb = LogMelSpectrogram(b, config);
  return (la - lb).cwiseAbs().mean();
}

}  // namespace

double MelConfig::ResolvedFMax() const {
  return f_max > 0.0 ? f_max : sample_rate / 2.0;
}

void MelConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (!IsPowerOfTwo(n_fft)) throw ConfigError("n_fft must be a power of two");
  if (hop < 1 || hop > n_fft) throw ConfigError("hop must be in [1, n_fft]");
  if (n_mels < 1) throw ConfigError("n_mels must be >= 1");
  const double f_hi = ResolvedFMax();
  if (f_min < 0.0 || f_min >= f_hi || f_hi > sample_rate / 2.0) {
    throw ConfigError("mel range must satisfy 0 <= f_min < f_max <= sr/2");
  }
  if (!(log_floor > 0.0)) throw ConfigError("log_floor must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::MatrixXd MelFilterbank(const MelConfig& config) {
  config.Validate();
  const int bins = config.n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(config.sample_rate) / config.n_fft;
  const double mel_lo = HzToMel(config.f_min);
  const double mel_hi = HzToMel(config.ResolvedFMax());
  std::vector<double> edges(static_cast<size_t>(config.n_mels) + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    (config.n_mels + 1));
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(config.n_mels, bins);
  for (int m = 0; m < config.n_mels; ++m) {
    const double left = edges[m];
    const double centre = edges[m + 1];
    const double right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double rise = (f - left) / (centre - left);
      const double fall = (right - f) / (right - centre);
      fb(m, k) = std::max(0.0, std::min(rise, fall));
    }
    if (fb.row(m).sum() == 0.0) {
      const int nearest =
          std::clamp(static_cast<int>(std::lround(centre / bin_hz)), 0, bins - 1);
      fb(m, nearest) = 1.0;
    }
  }
  return fb;
}

Eigen::VectorXd HannWindow(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

RowMatrix StftMagnitude(const AudioBuffer& audio, const MelConfig& config) {
  if (!IsPowerOfTwo(config.n_fft)) throw ConfigError("n_fft must be a power of two");
  if (config.hop < 1 || config.hop > config.n_fft) {
    throw ConfigError("hop must be in [1, n_fft]");
  }
  const auto len = static_cast<long>(audio.samples.size());
  if (len < config.n_fft) {
    throw ValidationError("audio buffer has " + std::to_string(len) +
                          " samples, shorter than n_fft = " +
                          std::to_string(config.n_fft));
  }
  const long frames = (len - config.n_fft) / config.hop + 1;
  const int bins = config.n_fft / 2 + 1;
  const Eigen::VectorXd window = HannWindow(config.n_fft);
  RowMatrix out(frames, bins);
  RealFft fft(config.n_fft);
  for (long f = 0; f < frames; ++f) {
    const double* src = audio.samples.data() + f * config.hop;
    double* in = fft.input();
    for (int i = 0; i < config.n_fft; ++i) in[i] = src[i] * window[i];
    fft.Magnitude(out.row(f));
  }
  return out;
}

RowMatrix LogMelSpectrogram(const AudioBuffer& audio, const MelConfig& config) {
  config.Validate();
  if (audio.sample_rate != config.sample_rate) {
    throw ConfigError("audio sample rate " + std::to_string(audio.sample_rate) +
                      " Hz does not match configured " +
                      std::to_string(config.sample_rate) + " Hz");
  }
  const RowMatrix mag = StftMagnitude(audio, config);
  const Eigen::MatrixXd fb = MelFilterbank(config);
  RowMatrix mel = mag * fb.transpose();
  return (mel.array() + config.log_floor).log().matrix();
}

EmbeddingSet MelEmbed(const AudioBuffer& audio, const MelConfig& config,
                      std::string source_id) {
  return EmbeddingSet(LogMelSpectrogram(audio, config), std::move(source_id));
}

double MelLoss(const AudioBuffer& a, const AudioBuffer& b,
               const MelConfig& config) {
  if (a.samples.size() != b.samples.size()) {
    throw ShapeError("mel loss needs equal-length signals (" +
                     std::to_string(a.samples.size()) + " vs " +
                     std::to_string(b.samples.size()) + ")");
  }
  if (a.sample_rate != b.sample_rate) {
    throw ShapeError("mel loss needs equal sample rates");
  }
  if (!config.multiscale) return SingleScaleMelLoss(a, b, config);
  double total = 0.0;
  for (int n_fft : {512, 1024, 2048}) {
    total += SingleScaleMelLoss(a, b, WithScale(config, n_fft));
  }
  return total;
}

}  // namespace audiodist
