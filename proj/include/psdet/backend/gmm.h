// psdet/backend/gmm.h

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

// Diagonal-covariance Gaussian mixtures for the frame-level baseline.

#ifndef PSDET_BACKEND_GMM_H_
#define PSDET_BACKEND_GMM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psdet/binary-io.h"
#include "psdet/features.h"
#include "psdet/scoring.h"

namespace psdet {

inline constexpr double kGmmVarianceFloor = 1e-6;

struct GmmModel {
  Vector weights;     // K, sums to one
  Matrix means;       // K x D
  Matrix variances;   // K x D, every entry >= kGmmVarianceFloor

  int NumComponents() const { return static_cast<int>(weights.size()); }
  int Dim() const { return static_cast<int>(means.cols()); }

  // log p(x) for one frame.
  double LogLikelihood(const double *x) const;
  // Mean of log p(x) over the rows.
  double MeanLogLikelihood(const Matrix &frames) const;

  void AddTo(ModelFile *file, const std::string &prefix) const;
  static GmmModel FromFile(const ModelFile &file, const std::string &prefix);
};

struct GmmTrainOptions {
  int n_components = 64;
  int n_iters = 20;
  int kmeans_iters = 5;
  uint64_t seed = 0;
};

struct GmmTrainResult {
  GmmModel model;
  // Mean per-frame log-likelihood of the initial model and after each EM
  // iteration.
  std::vector<double> log_likelihood;
};

// k-means on seeded random distinct frames, then EM.  Throws TooFewFrames
// when frames < n_components.
GmmTrainResult TrainGmmEm(const Matrix &frames, const GmmTrainOptions &opts);

// log p(frame | spoof) - log p(frame | pristine) per frame.  Throws
// DimensionMismatch.
ScoreSeries GmmFrameLlr(const GmmModel &spoof, const GmmModel &pristine,
                        const FeatureMatrix &features);

}  // namespace psdet

#endif  // PSDET_BACKEND_GMM_H_
