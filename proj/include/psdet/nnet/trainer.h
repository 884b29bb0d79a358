// psdet/nnet/trainer.h

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

// Training loop for the embedding network and sliding-window embedding
// extraction.

#ifndef PSDET_NNET_TRAINER_H_
#define PSDET_NNET_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psdet/augment.h"
#include "psdet/features.h"
#include "psdet/nnet/adam.h"
#include "psdet/nnet/xresnet.h"

namespace psdet {

struct LabeledFeatures {
  FeatureMatrix features;  // T x D
  int label = 0;           // 0 pristine, 1 spoof
};

struct NnetTrainOptions {
  int max_epochs = 20;
  int patience = 12;
  int batch_size = 64;
  int crop_frames = 500;
  // Hop between dev windows; each dev utterance is scored by the mean of
  // -cosine over its windows.
  int dev_shift = 100;
  bool freq_mask = true;
  FreqMaskConfig mask;
  AdamOptions adam;
  uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_eer = 0.0;
  bool improved = false;
};

struct NnetTrainResult {
  XResNet<float> model;  // best dev-EER checkpoint
  std::vector<EpochRecord> log;
  int best_epoch = 0;

  std::string LogText() const;
};

// One pass per epoch over the shuffled training set: a random crop_frames
// crop per utterance (zero-padded when shorter), frequency masking, batches
// of batch_size, OC-Softmax loss and Adam.  After each epoch the dev EER is
// measured; training stops after max_epochs or once max(patience, 1)
// consecutive epochs fail to improve on the best dev EER.  Throws
// InsufficientData unless both sets hold both classes.
NnetTrainResult TrainXResNet(const XResNetConfig &cfg, const std::vector<LabeledFeatures> &train,
                             const std::vector<LabeledFeatures> &dev,
                             const NnetTrainOptions &opts);

// Copies frames [start, start + len) of a T x D matrix into a 1 x 1 x D x len
// tensor, zero-filling frames past the end.
template <typename T>
Tensor4<T> FeaturesToTensor(const FeatureMatrix &features, int start, int len);

// Concatenates samples along the batch axis.
template <typename T>
Tensor4<T> StackBatch(const std::vector<Tensor4<T>> &samples);

struct EmbeddingWindows {
  Matrix embeddings;            // n_windows x embedding_dim
  std::vector<double> scores;   // cosine score per window
  std::vector<int> starts;      // first frame of each window
  bool padded = false;          // single zero-padded window
};

// Windows [shift k, shift k + window) for k = 0 .. (T - window) / shift.  A
// shorter input yields one zero-padded window.  Throws EmptyFeatures for
// T == 0.
EmbeddingWindows ExtractEmbeddings(const XResNet<float> &model, const FeatureMatrix &features,
                                   int window = 500, int shift = 10);

// -mean(cosine) over the windows: higher means more spoof-like.
double CosineUtteranceScore(const XResNet<float> &model, const FeatureMatrix &features,
                            int window, int shift);

}  // namespace psdet

#endif  // PSDET_NNET_TRAINER_H_
