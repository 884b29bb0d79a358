// psdet/toy-corpus.h

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

// Synthetic two-class corpus for end-to-end checks.  "Pristine" utterances
// are syllable trains of harmonic tone complexes band-limited to 3.8 kHz;
// "spoof" utterances share the source model but carry a class-specific
// band of inharmonic partials above 4 kHz while voiced, and a steadier
// pitch.  Partially spoofed utterances splice a spoof stretch into a
// pristine one.

#ifndef PSDET_TOY_CORPUS_H_
#define PSDET_TOY_CORPUS_H_

#include <cstdint>
#include <random>
#include <string>

#include "psdet/audio-io.h"

namespace psdet {

struct ToyCorpusOptions {
  int n_pristine_classes = 4;
  int n_spoof_classes = 4;
  int train_per_class = 25;
  int dev_per_class = 3;
  // Eval: this many pristine, fully spoofed and partially spoofed utterances
  // per class.
  int eval_per_class = 6;
  double train_seconds = 6.0;
  double eval_seconds = 10.0;
  double insert_fraction = 0.2;
  // Level of the spoof band relative to the harmonic part, in dB.
  double artifact_db = -22.0;
  uint64_t seed = 1;
};

// One utterance of the given class.
AudioBuffer ToyUtterance(Label label, int class_index, double seconds, const ToyCorpusOptions &opts,
                         std::mt19937_64 *rng);

// A pristine utterance with a spoof stretch of insert_fraction * seconds
// spliced in at a random position.
AudioBuffer ToyPartialSpoof(int pristine_class, int spoof_class, double seconds,
                            const ToyCorpusOptions &opts, std::mt19937_64 *rng);

// Stationary noise for augmentation.
AudioBuffer ToyNoise(double seconds, std::mt19937_64 *rng);

struct ToyCorpusPaths {
  std::string manifest;          // train, dev and fully spoofed eval
  std::string partial_manifest;  // pristine eval plus partially spoofed eval
  std::string noise_manifest;
};

// Writes WAV files and manifests (relative paths) below dir.
ToyCorpusPaths WriteToyCorpus(const std::string &dir, const ToyCorpusOptions &opts);

}  // namespace psdet

#endif  // PSDET_TOY_CORPUS_H_
