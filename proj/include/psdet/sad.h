// psdet/sad.h

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

// Speech activity detection: MFCC context windows fed through a small
// feed-forward network, smoothed posteriors, thresholding, and padded
// segments that select the frames passed on to the embedding network.

#ifndef PSDET_SAD_H_
#define PSDET_SAD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psdet/binary-io.h"
#include "psdet/features.h"
#include "psdet/scoring.h"

namespace psdet {

inline constexpr int kSadContext = 31;
inline constexpr int kSadInputDim = kMfccDim * kSadContext;

// 620 -> 500 -> 100 -> 2, ReLU hidden layers, softmax output.  Output 1 is
// the speech class.
struct SadModel {
  Matrix w1, w2, w3;
  Vector b1, b2, b3;

  static SadModel Zeros();
  // He-normal weights, zero biases.
  static SadModel Init(uint64_t seed);

  ModelFile ToFile() const;
  static SadModel FromFile(const ModelFile &file);
  bool operator==(const SadModel &other) const;
};

struct SadOptions {
  double mvn_window_s = 0.5;
  double smooth_window_s = 0.5;
  double threshold = 0.5;
  double pad_s = 1.0 / 3.0;
};

// Half-open [start_s, end_s).
struct Segment {
  double start_s;
  double end_s;
  bool operator==(const Segment &) const = default;
};
using SegmentList = std::vector<Segment>;

// Row t concatenates frames t-15 .. t+15, replicating the edge frames.
Matrix StackContext(const FeatureMatrix &mfcc, int context_frames = kSadContext);

// Speech posterior per frame.  Throws DimensionMismatch when the stacked
// width disagrees with the model.
ScoreSeries SadForward(const SadModel &model, const Matrix &stacked);

// Both class posteriors, rows sum to one.
Matrix SadPosteriors(const SadModel &model, const Matrix &stacked);

ScoreSeries SmoothScores(const ScoreSeries &scores, int window_frames);

// Runs of frames scoring above the threshold, each widened by pad_s on both
// sides, clamped to [0, duration] and merged when they overlap.  Frame k
// covers [k * shift, (k + 1) * shift).
SegmentList ScoresToSegments(const ScoreSeries &scores, double threshold,
                             double pad_s, double frame_shift_s = kFrameShift);

// Keeps frames whose timestamp lies inside some segment.  Throws
// EmptyResult when nothing survives.
FeatureMatrix ApplyMask(const FeatureMatrix &features, const SegmentList &segments);

std::string FormatSegments(const SegmentList &segments);

// The full chain on one utterance: MFCC, sliding MVN, context stacking,
// network, smoothing, thresholding and padding.
SegmentList DetectSpeech(const SadModel &model, const AudioBuffer &audio,
                         const SadOptions &opts = SadOptions());

// Frame labels for SAD training: 1 where the frame's log energy is within
// range_db of the loudest frame and above an absolute floor.
std::vector<int> EnergyGateLabels(const AudioBuffer &audio, double range_db = 30.0);

struct SadTrainingUtterance {
  FeatureMatrix mfcc;  // raw MFCC; normalized inside training
  std::vector<int> labels;
};

struct SadTrainOptions {
  int epochs = 5;
  int batch_size = 256;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  double mvn_window_s = 0.5;
};

struct SadTrainResult {
  SadModel model;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Adam on frame-level cross-entropy.  Throws InsufficientData without
// frames of both classes.
SadTrainResult TrainSad(const std::vector<SadTrainingUtterance> &data,
                        const SadTrainOptions &opts);

// Fraction of frames whose argmax posterior matches the label.
double SadFrameAccuracy(const SadModel &model,
                        const std::vector<SadTrainingUtterance> &data,
                        double mvn_window_s = 0.5);

}  // namespace psdet

#endif  // PSDET_SAD_H_
