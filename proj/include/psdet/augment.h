// psdet/augment.h

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

#ifndef PSDET_AUGMENT_H_
#define PSDET_AUGMENT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "psdet/audio-io.h"
#include "psdet/features.h"

namespace psdet {

// The two addends of a noisy mixture, before summation.
struct MixComponents {
  std::vector<double> clean;
  std::vector<double> noise;  // already scaled by the gain
  double gain = 0.0;
  size_t noise_offset = 0;
};

// Crops noise at a seeded random offset and scales it so that
// 20 log10(rms(clean) / rms(gain * crop)) == snr_db.  Throws ZeroPower when
// either side is silent and TooShort when the noise is shorter than clean.
MixComponents MixComponentsAtSnr(const AudioBuffer &clean, const AudioBuffer &noise,
                                 double snr_db, uint64_t seed);

// clean + gain * crop.  If any sample then exceeds 1 in magnitude, the
// whole signal is divided by its peak, which leaves the SNR unchanged.
AudioBuffer MixAtSnr(const AudioBuffer &clean, const AudioBuffer &noise,
                     double snr_db, uint64_t seed);

double Rms(std::span<const double> x);

struct FreqMaskConfig {
  int n_masks = 2;
  int max_width = 7;
};

struct FreqMask {
  int start;
  int width;
};

// Draws the bands frequency_mask would use on a D-channel input.
std::vector<FreqMask> SampleFreqMasks(int dim, const FreqMaskConfig &cfg, uint64_t seed);

// Sets channels f0 .. f0+f-1 of every frame to the global mean of the
// input, with f ~ U{1..F}, f0 ~ U{0..D-f}, once per mask.
FeatureMatrix FrequencyMask(const FeatureMatrix &features, const FreqMaskConfig &cfg,
                            uint64_t seed);

}  // namespace psdet

#endif  // PSDET_AUGMENT_H_
