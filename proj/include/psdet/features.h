// psdet/features.h

// Copyright 2026  psdet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PSDET_FEATURES_H_
#define PSDET_FEATURES_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "psdet/audio-io.h"

namespace psdet {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class FeatureKind : uint32_t { kLfb = 0, kMfcc = 1, kScores = 2, kEmbedding = 3 };

inline constexpr int kLfbDim = 70;
inline constexpr int kMfccDim = 20;
inline constexpr double kFrameShift = 0.010;
inline constexpr double kLogFloor = 1e-10;

// T x D, one row per frame.  Frame k is centred at k * frame_shift_s.
struct FeatureMatrix {
  Matrix values;
  double frame_shift_s = kFrameShift;
  FeatureKind kind = FeatureKind::kLfb;

  int NumFrames() const { return static_cast<int>(values.rows()); }
  int Dim() const { return static_cast<int>(values.cols()); }
  double FrameTime(int k) const { return k * frame_shift_s; }
};

struct FrameOptions {
  double frame_length_s = 0.025;
  double hop_s = 0.010;
  int n_fft = 512;
};

// Splits the signal into n = 1 + (N - L) / H frames of L samples, each
// multiplied by a Hamming window.  Throws TooShort when N < L.
Matrix FrameSignal(const AudioBuffer &audio, double frame_length_s, double hop_s);

int NumFrames(int num_samples, int frame_samples, int hop_samples);

std::vector<double> HammingWindow(int length);

// |FFT|^2 of each zero-padded row, bins 0 .. n_fft/2.
Matrix PowerSpectrum(const Matrix &frames, int n_fft);

enum class FilterScale { kLinear, kMel };

struct FilterBank {
  Matrix weights;  // n_filters x (n_fft/2 + 1)
  std::vector<double> center_freqs;
  FilterScale scale = FilterScale::kLinear;

  int NumFilters() const { return static_cast<int>(weights.rows()); }
};

// Triangular filters whose n_filters + 2 boundary points are equally spaced
// from 0 Hz to Nyquist.  Each bin's weight is the mean of the triangle over
// that bin's frequency band, so every row sums to (triangle area) / (bin
// width) regardless of how the triangle sits on the FFT grid.
FilterBank BuildLinearFilterBank(int n_filters, int n_fft, int sample_rate);

// Same construction with boundary points equally spaced on the mel scale,
// mel(f) = 1127 ln(1 + f / 700).
FilterBank BuildMelFilterBank(int n_filters, int n_fft, int sample_rate);

double HzToMel(double hz);
double MelToHz(double mel);

// log(max(weights * power_row, kLogFloor)) for every frame.
FeatureMatrix ApplyFilterBankLog(const Matrix &spectrum, const FilterBank &fb,
                                 FeatureKind kind = FeatureKind::kLfb);

// Orthonormal DCT-II: c_k = s_k sum_n x_n cos(pi k (n + 1/2) / N).  Rows of
// the returned matrix are basis vectors, keep the first num_out of them.
Matrix DctMatrix(int num_out, int num_in);

// 70 linear filters, 25 ms Hamming frames every 10 ms, 512-point FFT.
FeatureMatrix ComputeLfb(const AudioBuffer &audio);

// 30 mel filters, log, DCT-II coefficients 0..19.
FeatureMatrix ComputeMfcc(const AudioBuffer &audio);

inline constexpr int kMelFilters = 30;

// Per-dimension normalization by the mean and standard deviation of a
// centred window of round(window_s / frame_shift) frames, i.e. frames
// t - half .. t + half inclusive, clipped at the edges.
FeatureMatrix MvnSliding(const FeatureMatrix &features, double window_s);

}  // namespace psdet

#endif  // PSDET_FEATURES_H_
