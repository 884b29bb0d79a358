// psdet/augment.cc

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

#include "psdet/augment.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "psdet/error.h"

namespace psdet {

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return std::sqrt(sum / static_cast<double>(x.size()));
}

MixComponents MixComponentsAtSnr(const AudioBuffer &clean, const AudioBuffer &noise,
                                 double snr_db, uint64_t seed) {
  if (clean.sample_rate != noise.sample_rate)
    throw Error(ErrorCode::kUnsupportedFormat, "clean and noise sample rates differ");
  if (noise.samples.size() < clean.samples.size())
    throw Error(ErrorCode::kTooShort, "noise shorter than clean signal");
  MixComponents mix;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> offset(0, noise.samples.size() - clean.samples.size());
  mix.noise_offset = offset(rng);
  mix.clean.assign(clean.samples.begin(), clean.samples.end());
  mix.noise.assign(noise.samples.begin() + static_cast<std::ptrdiff_t>(mix.noise_offset),
                   noise.samples.begin() +
                       static_cast<std::ptrdiff_t>(mix.noise_offset + clean.samples.size()));
  const double clean_rms = Rms(mix.clean), noise_rms = Rms(mix.noise);
  if (clean_rms == 0.0) throw Error(ErrorCode::kZeroPower, "clean signal is silent");
  if (noise_rms == 0.0) throw Error(ErrorCode::kZeroPower, "noise crop is silent");
  mix.gain = clean_rms / noise_rms * std::pow(10.0, -snr_db / 20.0);
  for (double &v : mix.noise) v *= mix.gain;
  return mix;
}

AudioBuffer MixAtSnr(const AudioBuffer &clean, const AudioBuffer &noise, double snr_db,
                     uint64_t seed) {
  MixComponents mix = MixComponentsAtSnr(clean, noise, snr_db, seed);
  std::vector<double> sum(mix.clean.size());
  double peak = 0.0;
  for (size_t i = 0; i < sum.size(); i++) {
    sum[i] = mix.clean[i] + mix.noise[i];
    peak = std::max(peak, std::abs(sum[i]));
  }
  const double scale = peak > 1.0 ? 1.0 / peak : 1.0;
  AudioBuffer out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(sum.size());
  for (size_t i = 0; i < sum.size(); i++)
    out.samples[i] = static_cast<float>(std::clamp(sum[i] * scale, -1.0, 1.0));
  return out;
}

std::vector<FreqMask> SampleFreqMasks(int dim, const FreqMaskConfig &cfg, uint64_t seed) {
  if (cfg.max_width < 1 || dim < cfg.max_width)
    throw Error(ErrorCode::kInvalidConfig,
                "frequency mask width " + std::to_string(cfg.max_width) +
                    " does not fit " + std::to_string(dim) + " channels");
  std::mt19937_64 rng(seed);
  std::vector<FreqMask> masks;
  for (int i = 0; i < cfg.n_masks; i++) {
    const int width = std::uniform_int_distribution<int>(1, cfg.max_width)(rng);
    const int start = std::uniform_int_distribution<int>(0, dim - width)(rng);
    masks.push_back({start, width});
  }
  return masks;
}

FeatureMatrix FrequencyMask(const FeatureMatrix &features, const FreqMaskConfig &cfg,
                            uint64_t seed) {
  FeatureMatrix out = features;
  if (features.values.size() == 0) return out;
  // Shifted mean: exact for constant input.
  const double base = features.values.minCoeff();
  const double fill = base + (features.values.array() - base).mean();
  for (const FreqMask &m : SampleFreqMasks(features.Dim(), cfg, seed))
    out.values.middleCols(m.start, m.width).setConstant(fill);
  return out;
}

}  // namespace psdet
