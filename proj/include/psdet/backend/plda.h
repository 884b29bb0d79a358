// psdet/backend/plda.h

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

// Two-covariance style PLDA with a low-rank class subspace:
//
//   w = mu + U1 x1 + eps,   x1 ~ N(0, I_q),   eps ~ N(0, Lambda)
//
// x1 is shared by every embedding of a class.  Scoring uses sufficient
// statistics (count and sum), so an enrollment of n embeddings costs the
// same as one.

#ifndef PSDET_BACKEND_PLDA_H_
#define PSDET_BACKEND_PLDA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psdet/binary-io.h"
#include "psdet/features.h"

namespace psdet {

struct PldaModel {
  Vector mu;       // D
  Matrix u1;       // D x q
  Matrix lambda;   // D x D, symmetric positive definite

  int Dim() const { return static_cast<int>(mu.size()); }
  int SubspaceDim() const { return static_cast<int>(u1.cols()); }

  void AddTo(ModelFile *file, const std::string &prefix) const;
  static PldaModel FromFile(const ModelFile &file, const std::string &prefix);
};

// Count and sum of a set of embeddings.
struct PldaStats {
  int count = 0;
  Vector sum;

  static PldaStats FromRows(const Matrix &rows);
  static PldaStats FromVector(const Vector &x);
};

struct PldaTrainOptions {
  int q = 16;
  int n_iters = 10;
  uint64_t seed = 0;
};

struct PldaTrainResult {
  PldaModel model;
  // Marginal log-likelihood per embedding, before the first update and
  // after every iteration (n_iters + 1 entries).
  std::vector<double> log_likelihood;
};

// EM with mu fixed at the sample mean and a seeded random start for U1.
// q == 0 gives the single Gaussian (mu, sample covariance).  Throws
// DegenerateData with fewer than two classes or two embeddings, or when
// the sample covariance is singular; InvalidConfig when q > D.
PldaTrainResult TrainPldaEm(const Matrix &x, const std::vector<std::string> &class_ids,
                            const PldaTrainOptions &opts);

// Precomputed quantities for fast scoring.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel &model);

  // log p(all embeddings of one class) up to the per-embedding Gaussian
  // term sum_j log N(x_j; mu, Lambda), which cancels in every ratio.
  double ClassTerm(const PldaStats &stats) const;

  // Exact log p(x_1..x_n) under the model for one class.
  double ClassLogLikelihood(const Matrix &rows) const;

  // log p(enroll, test | same class) - log p(enroll) - log p(test).
  double Llr(const PldaStats &enroll, const PldaStats &test) const;

  const PldaModel &model() const { return model_; }

 private:
  PldaModel model_;
  Eigen::MatrixXd lambda_inv_;
  Eigen::MatrixXd a_;  // U1^T Lambda^-1 U1
  Eigen::MatrixXd b_;  // U1^T Lambda^-1
  double lambda_logdet_ = 0.0;
};

// Throws DimensionMismatch, EmptyClass for an empty enrollment.
double PldaLlr(const PldaModel &model, const Matrix &enroll, const Vector &test);

// llr(spoof enrollment, test) - llr(pristine enrollment, test).
double DetectionScore(const PldaScorer &scorer, const PldaStats &pristine,
                      const PldaStats &spoof, const Vector &test);
double DetectionScore(const PldaModel &model, const Matrix &pristine_enroll,
                      const Matrix &spoof_enroll, const Vector &test);

}  // namespace psdet

#endif  // PSDET_BACKEND_PLDA_H_
