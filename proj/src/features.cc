// psdet/features.cc

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

#include "psdet/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "psdet/error.h"

namespace psdet {

namespace {

// The FFTW planner is not thread-safe; execution with a private plan is.
std::mutex fftw_planner_mutex;

int SecondsToSamples(double seconds, int sample_rate) {
  return static_cast<int>(std::lround(seconds * sample_rate));
}

// Integral of the unit-height triangle (left, centre, right) from -inf to x.
double TriangleIntegral(double left, double centre, double right, double x) {
  if (x <= left) return 0.0;
  if (x <= centre) return (x - left) * (x - left) / (2.0 * (centre - left));
  const double rise_area = 0.5 * (centre - left);
  if (x <= right)
    return rise_area + 0.5 * (right - centre) -
           (right - x) * (right - x) / (2.0 * (right - centre));
  return 0.5 * (right - left);
}

FilterBank BuildFromBoundaries(const std::vector<double> &boundaries_hz,
                               int n_fft, int sample_rate, FilterScale scale) {
  const int n_filters = static_cast<int>(boundaries_hz.size()) - 2;
  const int n_bins = n_fft / 2 + 1;
  const double bin_width = static_cast<double>(sample_rate) / n_fft;
  FilterBank fb;
  fb.scale = scale;
  fb.weights = Matrix::Zero(n_filters, n_bins);
  fb.center_freqs.resize(n_filters);
  for (int i = 0; i < n_filters; i++) {
    const double left = boundaries_hz[i], centre = boundaries_hz[i + 1],
                 right = boundaries_hz[i + 2];
    fb.center_freqs[i] = centre;
    for (int k = 0; k < n_bins; k++) {
      const double lo = (k - 0.5) * bin_width, hi = (k + 0.5) * bin_width;
      if (hi <= left || lo >= right) continue;
      fb.weights(i, k) = (TriangleIntegral(left, centre, right, hi) -
                          TriangleIntegral(left, centre, right, lo)) /
                         bin_width;
    }
  }
  return fb;
}

}  // namespace

int NumFrames(int num_samples, int frame_samples, int hop_samples) {
  if (num_samples < frame_samples) return 0;
  return 1 + (num_samples - frame_samples) / hop_samples;
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length);
  if (length == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int n = 0; n < length; n++)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

Matrix FrameSignal(const AudioBuffer &audio, double frame_length_s, double hop_s) {
  const int frame_samples = SecondsToSamples(frame_length_s, audio.sample_rate);
  const int hop_samples = SecondsToSamples(hop_s, audio.sample_rate);
  if (frame_samples <= 0 || hop_samples <= 0)
    throw Error(ErrorCode::kInvalidConfig, "frame length and hop must be positive");
  const int n = static_cast<int>(audio.samples.size());
  if (n < frame_samples)
    throw Error(ErrorCode::kTooShort, std::to_string(n) + " samples < frame length " +
                                          std::to_string(frame_samples));
  const int n_frames = NumFrames(n, frame_samples, hop_samples);
  const std::vector<double> window = HammingWindow(frame_samples);
  Matrix frames(n_frames, frame_samples);
  for (int f = 0; f < n_frames; f++) {
    const float *src = audio.samples.data() + static_cast<size_t>(f) * hop_samples;
    for (int i = 0; i < frame_samples; i++) frames(f, i) = src[i] * window[i];
  }
  return frames;
}

Matrix PowerSpectrum(const Matrix &frames, int n_fft) {
  if (frames.cols() > n_fft)
    throw Error(ErrorCode::kDimensionMismatch, "frame longer than n_fft");
  const int n_bins = n_fft / 2 + 1;
  Matrix power(frames.rows(), n_bins);
  if (frames.rows() == 0) return power;

  std::unique_ptr<double, decltype(&fftw_free)> in(
      static_cast<double *>(fftw_malloc(sizeof(double) * n_fft)), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(
      static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n_bins)),
      &fftw_free);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(n_fft, in.get(), out.get(), FFTW_ESTIMATE);
  }
  for (Eigen::Index f = 0; f < frames.rows(); f++) {
    std::fill(in.get(), in.get() + n_fft, 0.0);
    for (Eigen::Index i = 0; i < frames.cols(); i++) in.get()[i] = frames(f, i);
    fftw_execute(plan);
    for (int k = 0; k < n_bins; k++) {
      const double re = out.get()[k][0], im = out.get()[k][1];
      power(f, k) = re * re + im * im;
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  return power;
}

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

FilterBank BuildLinearFilterBank(int n_filters, int n_fft, int sample_rate) {
  if (n_filters < 1) throw Error(ErrorCode::kInvalidConfig, "n_filters must be >= 1");
  const double nyquist = 0.5 * sample_rate;
  std::vector<double> boundaries(n_filters + 2);
  for (int j = 0; j < n_filters + 2; j++)
    boundaries[j] = nyquist * j / (n_filters + 1);
  return BuildFromBoundaries(boundaries, n_fft, sample_rate, FilterScale::kLinear);
}

FilterBank BuildMelFilterBank(int n_filters, int n_fft, int sample_rate) {
  if (n_filters < 1) throw Error(ErrorCode::kInvalidConfig, "n_filters must be >= 1");
  const double mel_max = HzToMel(0.5 * sample_rate);
  std::vector<double> boundaries(n_filters + 2);
  for (int j = 0; j < n_filters + 2; j++)
    boundaries[j] = MelToHz(mel_max * j / (n_filters + 1));
  boundaries.front() = 0.0;
  boundaries.back() = 0.5 * sample_rate;
  return BuildFromBoundaries(boundaries, n_fft, sample_rate, FilterScale::kMel);
}

FeatureMatrix ApplyFilterBankLog(const Matrix &spectrum, const FilterBank &fb,
                                 FeatureKind kind) {
  if (spectrum.cols() != fb.weights.cols())
    throw Error(ErrorCode::kDimensionMismatch,
                "spectrum has " + std::to_string(spectrum.cols()) +
                    " bins, filterbank expects " + std::to_string(fb.weights.cols()));
  FeatureMatrix out;
  out.kind = kind;
  out.values = spectrum * fb.weights.transpose();
  out.values = out.values.array().max(kLogFloor).log().matrix();
  return out;
}

Matrix DctMatrix(int num_out, int num_in) {
  Matrix dct(num_out, num_in);
  for (int k = 0; k < num_out; k++) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / num_in);
    for (int n = 0; n < num_in; n++)
      dct(k, n) = scale * std::cos(std::numbers::pi * k * (n + 0.5) / num_in);
  }
  return dct;
}

FeatureMatrix ComputeLfb(const AudioBuffer &audio) {
  static const FilterBank fb = BuildLinearFilterBank(kLfbDim, 512, kSampleRate);
  FrameOptions opts;
  Matrix frames = FrameSignal(audio, opts.frame_length_s, opts.hop_s);
  return ApplyFilterBankLog(PowerSpectrum(frames, opts.n_fft), fb, FeatureKind::kLfb);
}

FeatureMatrix ComputeMfcc(const AudioBuffer &audio) {
  static const FilterBank fb = BuildMelFilterBank(kMelFilters, 512, kSampleRate);
  static const Matrix dct = DctMatrix(kMfccDim, kMelFilters);
  FrameOptions opts;
  Matrix frames = FrameSignal(audio, opts.frame_length_s, opts.hop_s);
  FeatureMatrix log_mel =
      ApplyFilterBankLog(PowerSpectrum(frames, opts.n_fft), fb, FeatureKind::kMfcc);
  FeatureMatrix out;
  out.kind = FeatureKind::kMfcc;
  out.values = log_mel.values * dct.transpose();
  return out;
}

FeatureMatrix MvnSliding(const FeatureMatrix &features, double window_s) {
  const int t_max = features.NumFrames(), dim = features.Dim();
  if (t_max == 0) throw Error(ErrorCode::kEmptyFeatures, "MVN of empty features");
  const int half =
      static_cast<int>(std::lround(window_s / features.frame_shift_s)) / 2;
  FeatureMatrix out = features;
  for (int t = 0; t < t_max; t++) {
    const int lo = std::max(0, t - half), hi = std::min(t_max - 1, t + half);
    const double count = hi - lo + 1;
    for (int d = 0; d < dim; d++) {
      double mean = 0.0;
      for (int s = lo; s <= hi; s++) mean += features.values(s, d);
      mean /= count;
      double var = 0.0;
      for (int s = lo; s <= hi; s++) {
        const double c = features.values(s, d) - mean;
        var += c * c;
      }
      const double stddev = std::max(std::sqrt(var / count), 1e-8);
      out.values(t, d) = (features.values(t, d) - mean) / stddev;
    }
  }
  return out;
}

}  // namespace psdet
