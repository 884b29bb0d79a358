// psdet/config.h

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

// Every tunable of the toolkit in one INI-style file:
//
//   [section]
//   key = value
//
// Missing keys keep their defaults; unknown sections or keys are rejected.
// Command-line flags are applied on top with Set("section.key", value).

#ifndef PSDET_CONFIG_H_
#define PSDET_CONFIG_H_

#include <cstdint>
#include <istream>
#include <string>

#include "psdet/augment.h"
#include "psdet/backend/gmm.h"
#include "psdet/nnet/trainer.h"
#include "psdet/nnet/xresnet.h"
#include "psdet/sad.h"
#include "psdet/scoring.h"

namespace psdet {

struct BackendTrainOptions {
  int lda_dim = 19;
  int plda_dim = 16;
  int plda_iters = 10;
  // Share of each class's utterances held out to build the enrollment
  // statistics.
  double enroll_fraction = 0.2;
  uint64_t seed = 0;
};

struct PipelineConfig {
  uint64_t seed = 0;

  bool sad_enabled = true;
  SadOptions sad;
  SadTrainOptions sad_train;

  double snr_db = 5.0;

  XResNetConfig model;
  NnetTrainOptions train;  // train.mask holds the frequency-mask settings

  int embed_window = 500;
  int embed_shift = 10;

  BackendTrainOptions backend;
  GmmTrainOptions gmm;
  InterleavedOptions pooling;

  // Throws InvalidConfig on unknown keys or unparsable values.
  static PipelineConfig Parse(std::istream &is);
  static PipelineConfig Load(const std::string &path);
  void Set(const std::string &dotted_key, const std::string &value);
  // Full config in the file format; Parse(ToIni()) round-trips.
  std::string ToIni() const;

  // Copies seed into every component that draws random numbers.
  void PropagateSeed();
  void Validate() const;
};

}  // namespace psdet

#endif  // PSDET_CONFIG_H_
