// psdet/backend/lda.cc

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

#include "psdet/backend/lda.h"

#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "psdet/error.h"

namespace psdet {

namespace {

using ColMatrix = Eigen::MatrixXd;

std::map<std::string, std::vector<int>> GroupRows(const std::vector<std::string> &ids) {
  std::map<std::string, std::vector<int>> groups;
  for (size_t i = 0; i < ids.size(); i++) groups[ids[i]].push_back(static_cast<int>(i));
  return groups;
}

}  // namespace

void ClassScatter(const Matrix &x, const std::vector<std::string> &class_ids, Matrix *within,
                  Matrix *between) {
  if (static_cast<size_t>(x.rows()) != class_ids.size())
    throw Error(ErrorCode::kDimensionMismatch, "one class id per row required");
  const Eigen::Index dim = x.cols();
  const double n = static_cast<double>(x.rows());
  const Vector mean = x.colwise().mean().transpose();
  ColMatrix sw = ColMatrix::Zero(dim, dim), sb = ColMatrix::Zero(dim, dim);
  for (const auto &[id, rows] : GroupRows(class_ids)) {
    Vector m = Vector::Zero(dim);
    for (int r : rows) m += x.row(r).transpose();
    m /= static_cast<double>(rows.size());
    for (int r : rows) {
      const Vector d = x.row(r).transpose() - m;
      sw.noalias() += d * d.transpose();
    }
    const Vector dm = m - mean;
    sb.noalias() += static_cast<double>(rows.size()) * dm * dm.transpose();
  }
  *within = sw / n;
  *between = sb / n;
}

LdaGaussianizer TrainLda(const Matrix &x, const std::vector<std::string> &class_ids,
                         int out_dim) {
  if (static_cast<size_t>(x.rows()) != class_ids.size() || x.rows() == 0)
    throw Error(ErrorCode::kDimensionMismatch, "one class id per row required");
  const int n_classes = static_cast<int>(GroupRows(class_ids).size());
  if (n_classes < 2)
    throw Error(ErrorCode::kInsufficientData, "LDA needs at least two classes");
  const int dim = static_cast<int>(x.cols());
  if (out_dim < 1 || out_dim > n_classes - 1 || out_dim > dim)
    throw Error(ErrorCode::kInvalidConfig,
                "LDA dimension " + std::to_string(out_dim) + " exceeds min(" +
                    std::to_string(n_classes - 1) + " classes - 1, " + std::to_string(dim) +
                    ")");
  Matrix within, between;
  ClassScatter(x, class_ids, &within, &between);
  ColMatrix sw = within, sb = between;
  sw = 0.5 * (sw + sw.transpose());
  sb = 0.5 * (sb + sb.transpose());

  Eigen::SelfAdjointEigenSolver<ColMatrix> sw_eig(sw, Eigen::EigenvaluesOnly);
  const double scale = std::max(sw_eig.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  if (sw_eig.eigenvalues().minCoeff() < 1e-10 * scale)
    sw += 1e-6 * ColMatrix::Identity(dim, dim);

  Eigen::GeneralizedSelfAdjointEigenSolver<ColMatrix> ges(sb, sw);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorCode::kSingularScatter, "within-class scatter is not positive definite");

  LdaGaussianizer lda;
  lda.mean = x.colwise().mean().transpose();
  // Eigenvalues ascend; keep the trailing out_dim columns, largest first.
  lda.projection.resize(dim, out_dim);
  for (int k = 0; k < out_dim; k++) {
    Vector v = ges.eigenvectors().col(dim - 1 - k);
    // Fix the sign so the largest-magnitude entry is positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    lda.projection.col(k) = v;
  }

  const ColMatrix centered = x.rowwise() - lda.mean.transpose();
  const ColMatrix y = centered * lda.projection;
  ColMatrix cov = y.transpose() * y / static_cast<double>(x.rows());
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<ColMatrix> ce(cov);
  if (ce.info() != Eigen::Success || ce.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::kSingularScatter, "projected covariance is singular");
  lda.whitening = ce.eigenvectors() *
                  ce.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                  ce.eigenvectors().transpose();
  return lda;
}

Vector LdaWhiten(const LdaGaussianizer &lda, const Vector &x) {
  if (x.size() != lda.InputDim())
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding has dimension " + std::to_string(x.size()) + ", expected " +
                    std::to_string(lda.InputDim()));
  return lda.whitening * (lda.projection.transpose() * (x - lda.mean));
}

Vector Gaussianize(const LdaGaussianizer &lda, const Vector &x) {
  const Vector z = LdaWhiten(lda, x);
  const double norm = z.norm();
  if (!(norm >= 1e-12))
    throw Error(ErrorCode::kZeroVector, "embedding maps to the zero vector");
  return z / norm;
}

Matrix GaussianizeRows(const LdaGaussianizer &lda, const Matrix &x) {
  Matrix out(x.rows(), lda.OutputDim());
  for (Eigen::Index r = 0; r < x.rows(); r++)
    out.row(r) = Gaussianize(lda, x.row(r).transpose()).transpose();
  return out;
}

void LdaGaussianizer::AddTo(ModelFile *file, const std::string &prefix) const {
  file->AddVector(prefix + "mean", mean);
  file->AddMatrix(prefix + "projection", projection);
  file->AddMatrix(prefix + "whitening", whitening);
}

LdaGaussianizer LdaGaussianizer::FromFile(const ModelFile &file, const std::string &prefix) {
  LdaGaussianizer lda;
  lda.mean = file.GetVector(prefix + "mean");
  lda.projection = file.GetMatrix(prefix + "projection");
  lda.whitening = file.GetMatrix(prefix + "whitening");
  if (lda.mean.size() != lda.projection.rows() ||
      lda.whitening.rows() != lda.projection.cols() ||
      lda.whitening.cols() != lda.projection.cols())
    throw Error(ErrorCode::kCorruptFile, "inconsistent LDA tensor shapes");
  return lda;
}

}  // namespace psdet
