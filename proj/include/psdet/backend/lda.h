// psdet/backend/lda.h

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

// LDA projection followed by whitening and length normalization, the
// "gaussianization" applied to embeddings before PLDA.

#ifndef PSDET_BACKEND_LDA_H_
#define PSDET_BACKEND_LDA_H_

#include <string>
#include <vector>

#include "psdet/binary-io.h"
#include "psdet/features.h"

namespace psdet {

struct LdaGaussianizer {
  Vector mean;         // D_in, training mean
  Matrix projection;   // D_in x D_out; y = projection^T (x - mean)
  Matrix whitening;    // D_out x D_out, symmetric; z = whitening y

  int InputDim() const { return static_cast<int>(projection.rows()); }
  int OutputDim() const { return static_cast<int>(projection.cols()); }

  // Prefix keeps several transforms apart inside one model file.
  void AddTo(ModelFile *file, const std::string &prefix) const;
  static LdaGaussianizer FromFile(const ModelFile &file, const std::string &prefix);
};

// Rows of x are embeddings, class_ids names their classes.  The projection
// solves Sb v = lambda Sw v for the out_dim leading eigenvectors; when Sw is
// near-singular 1e-6 I is added first.  The whitening matrix is the inverse
// square root of the covariance of the projected training data.  Throws
// InvalidConfig unless 1 <= out_dim <= min(n_classes - 1, D_in),
// InsufficientData with fewer than two classes, SingularScatter when Sw
// stays singular after regularization.
LdaGaussianizer TrainLda(const Matrix &x, const std::vector<std::string> &class_ids,
                         int out_dim);

// whitening * projection^T (x - mean), before length normalization.
Vector LdaWhiten(const LdaGaussianizer &lda, const Vector &x);

// LdaWhiten followed by scaling to unit norm.  Throws DimensionMismatch and
// ZeroVector (norm below 1e-12).
Vector Gaussianize(const LdaGaussianizer &lda, const Vector &x);

// Row-wise Gaussianize.
Matrix GaussianizeRows(const LdaGaussianizer &lda, const Matrix &x);

// Within- and between-class scatter (normalized by the sample count).
void ClassScatter(const Matrix &x, const std::vector<std::string> &class_ids, Matrix *within,
                  Matrix *between);

}  // namespace psdet

#endif  // PSDET_BACKEND_LDA_H_
