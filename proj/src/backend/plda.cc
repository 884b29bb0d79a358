// psdet/backend/plda.cc

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

#include "psdet/backend/plda.h"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "psdet/error.h"

namespace psdet {

namespace {

using ColMatrix = Eigen::MatrixXd;

double LogDetSpd(const ColMatrix &m, bool *ok) {
  Eigen::LLT<ColMatrix> llt(m);
  *ok = llt.info() == Eigen::Success;
  if (!*ok) return 0.0;
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

struct ClassStats {
  std::vector<int> counts;
  std::vector<Vector> sums;  // centred at mu
};

ClassStats Accumulate(const Matrix &x, const std::vector<std::string> &ids, const Vector &mu) {
  std::map<std::string, int> index;
  ClassStats stats;
  for (size_t i = 0; i < ids.size(); i++) {
    auto [it, inserted] = index.emplace(ids[i], static_cast<int>(stats.counts.size()));
    if (inserted) {
      stats.counts.push_back(0);
      stats.sums.push_back(Vector::Zero(x.cols()));
    }
    stats.counts[it->second]++;
    stats.sums[it->second] += x.row(static_cast<Eigen::Index>(i)).transpose() - mu;
  }
  return stats;
}

}  // namespace

PldaStats PldaStats::FromRows(const Matrix &rows) {
  PldaStats s;
  s.count = static_cast<int>(rows.rows());
  s.sum = rows.colwise().sum().transpose();
  return s;
}

PldaStats PldaStats::FromVector(const Vector &x) {
  PldaStats s;
  s.count = 1;
  s.sum = x;
  return s;
}

PldaScorer::PldaScorer(const PldaModel &model) : model_(model) {
  const int dim = model.Dim();
  if (model.lambda.rows() != dim || model.lambda.cols() != dim || model.u1.rows() != dim)
    throw Error(ErrorCode::kDimensionMismatch, "inconsistent PLDA model shapes");
  const ColMatrix lambda = model.lambda;
  Eigen::LLT<ColMatrix> llt(lambda);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kDegenerateData, "PLDA residual covariance is not positive definite");
  lambda_inv_ = llt.solve(ColMatrix::Identity(dim, dim));
  lambda_logdet_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const ColMatrix u1 = model.u1;
  b_ = u1.transpose() * lambda_inv_;
  a_ = b_ * u1;
}

double PldaScorer::ClassTerm(const PldaStats &stats) const {
  const int q = model_.SubspaceDim();
  if (q == 0) return 0.0;
  if (stats.sum.size() != model_.Dim())
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding has dimension " + std::to_string(stats.sum.size()) +
                    ", model expects " + std::to_string(model_.Dim()));
  const Vector centred = stats.sum - stats.count * model_.mu;
  const ColMatrix l = ColMatrix::Identity(q, q) + stats.count * a_;
  const Vector b = b_ * centred;
  Eigen::LLT<ColMatrix> llt(l);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * b.dot(llt.solve(b)) - 0.5 * logdet;
}

double PldaScorer::ClassLogLikelihood(const Matrix &rows) const {
  const int dim = model_.Dim();
  double total = 0.0;
  for (Eigen::Index r = 0; r < rows.rows(); r++) {
    const Vector d = rows.row(r).transpose() - model_.mu;
    total += -0.5 * (dim * std::log(2.0 * std::numbers::pi) + lambda_logdet_ +
                     d.dot(lambda_inv_ * d));
  }
  return total + ClassTerm(PldaStats::FromRows(rows));
}

double PldaScorer::Llr(const PldaStats &enroll, const PldaStats &test) const {
  if (enroll.count < 1 || test.count < 1)
    throw Error(ErrorCode::kEmptyClass, "PLDA scoring needs nonempty enrollment and test");
  PldaStats joint;
  joint.count = enroll.count + test.count;
  joint.sum = enroll.sum + test.sum;
  return ClassTerm(joint) - ClassTerm(enroll) - ClassTerm(test);
}

double PldaLlr(const PldaModel &model, const Matrix &enroll, const Vector &test) {
  if (enroll.rows() == 0) throw Error(ErrorCode::kEmptyClass, "empty enrollment");
  return PldaScorer(model).Llr(PldaStats::FromRows(enroll), PldaStats::FromVector(test));
}

double DetectionScore(const PldaScorer &scorer, const PldaStats &pristine,
                      const PldaStats &spoof, const Vector &test) {
  const PldaStats t = PldaStats::FromVector(test);
  return scorer.Llr(spoof, t) - scorer.Llr(pristine, t);
}

double DetectionScore(const PldaModel &model, const Matrix &pristine_enroll,
                      const Matrix &spoof_enroll, const Vector &test) {
  if (pristine_enroll.rows() == 0 || spoof_enroll.rows() == 0)
    throw Error(ErrorCode::kEmptyClass, "both enrollment sets must be nonempty");
  return DetectionScore(PldaScorer(model), PldaStats::FromRows(pristine_enroll),
                        PldaStats::FromRows(spoof_enroll), test);
}

PldaTrainResult TrainPldaEm(const Matrix &x, const std::vector<std::string> &class_ids,
                            const PldaTrainOptions &opts) {
  if (static_cast<size_t>(x.rows()) != class_ids.size())
    throw Error(ErrorCode::kDimensionMismatch, "one class id per row required");
  const int n = static_cast<int>(x.rows()), dim = static_cast<int>(x.cols()), q = opts.q;
  if (q < 0 || q > dim)
    throw Error(ErrorCode::kInvalidConfig,
                "PLDA subspace dimension " + std::to_string(q) + " exceeds " +
                    std::to_string(dim));
  if (n < 2) throw Error(ErrorCode::kDegenerateData, "PLDA needs at least two embeddings");

  PldaModel model;
  model.mu = x.colwise().mean().transpose();
  const ClassStats stats = Accumulate(x, class_ids, model.mu);
  if (stats.counts.size() < 2)
    throw Error(ErrorCode::kDegenerateData, "PLDA needs at least two classes");
  const ColMatrix centred = x.rowwise() - model.mu.transpose();
  ColMatrix scatter = centred.transpose() * centred;
  scatter = 0.5 * (scatter + scatter.transpose());
  const ColMatrix cov = scatter / n;
  {
    bool ok;
    LogDetSpd(cov, &ok);
    Eigen::SelfAdjointEigenSolver<ColMatrix> eig(cov, Eigen::EigenvaluesOnly);
    if (!ok || eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, cov.trace()))
      throw Error(ErrorCode::kDegenerateData, "sample covariance is singular");
  }
  // Start from the class-mean scatter: U1 spans its leading eigenvectors
  // and Lambda is the within-class scatter.  A random start converges very
  // slowly along the between-class directions, which only 1 / n_c of the
  // likelihood sees.  The seeded jitter keeps U1 full rank when there are
  // fewer classes than q.
  ColMatrix between = ColMatrix::Zero(dim, dim);
  for (size_t c = 0; c < stats.counts.size(); c++)
    between.noalias() += stats.sums[c] * stats.sums[c].transpose() / stats.counts[c];
  const double floor = 1e-3 * cov.trace() / dim;
  ColMatrix within = (scatter - between) / n;
  within = 0.5 * (within + within.transpose()) + floor * ColMatrix::Identity(dim, dim);
  between /= n;
  model.lambda = q > 0 ? within : cov;
  model.u1 = Matrix::Zero(dim, q);
  Eigen::SelfAdjointEigenSolver<ColMatrix> be(0.5 * (between + between.transpose()));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double jitter = 0.1 * std::sqrt(floor);
  for (int k = 0; k < q; k++) {
    const double ev = std::max(be.eigenvalues()(dim - 1 - k), 0.0);
    for (int i = 0; i < dim; i++)
      model.u1(i, k) = std::sqrt(ev) * be.eigenvectors()(i, dim - 1 - k) + jitter * normal(rng);
  }

  auto mean_loglik = [&](const PldaModel &m) {
    const PldaScorer scorer(m);
    double total = 0.0;
    const ColMatrix lambda_inv = m.lambda.inverse();
    bool ok;
    const double logdet = LogDetSpd(m.lambda, &ok);
    // Per-embedding Gaussian term via the scatter matrix.
    total += -0.5 * (n * (dim * std::log(2.0 * std::numbers::pi) + logdet) +
                     (lambda_inv.cwiseProduct(scatter)).sum());
    for (size_t c = 0; c < stats.counts.size(); c++) {
      PldaStats s;
      s.count = stats.counts[c];
      s.sum = stats.sums[c] + stats.counts[c] * m.mu;
      total += scorer.ClassTerm(s);
    }
    return total / n;
  };

  PldaTrainResult result;
  result.log_likelihood.push_back(mean_loglik(model));
  for (int iter = 0; iter < opts.n_iters; iter++) {
    if (q > 0) {
      const ColMatrix lambda = model.lambda;
      Eigen::LLT<ColMatrix> llt(lambda);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::kDegenerateData, "residual covariance lost definiteness");
      const ColMatrix u1 = model.u1;
      const ColMatrix b = llt.solve(u1).transpose();  // U1^T Lambda^-1
      const ColMatrix a = b * u1;
      ColMatrix acc_sy = ColMatrix::Zero(dim, q), acc_yy = ColMatrix::Zero(q, q);
      for (size_t c = 0; c < stats.counts.size(); c++) {
        const double nc = stats.counts[c];
        const ColMatrix l = ColMatrix::Identity(q, q) + nc * a;
        Eigen::LLT<ColMatrix> lc(l);
        const ColMatrix l_inv = lc.solve(ColMatrix::Identity(q, q));
        const Vector ey = l_inv * (b * stats.sums[c]);
        acc_sy.noalias() += stats.sums[c] * ey.transpose();
        acc_yy.noalias() += nc * (l_inv + ey * ey.transpose());
      }
      const ColMatrix u_new = acc_yy.transpose().llt().solve(acc_sy.transpose()).transpose();
      ColMatrix lambda_new = (scatter - u_new * acc_sy.transpose()) / n;
      lambda_new = 0.5 * (lambda_new + lambda_new.transpose());
      model.u1 = u_new;
      model.lambda = lambda_new;
    }
    result.log_likelihood.push_back(mean_loglik(model));
  }
  result.model = model;
  return result;
}

void PldaModel::AddTo(ModelFile *file, const std::string &prefix) const {
  file->AddVector(prefix + "mu", mu);
  file->AddMatrix(prefix + "u1", u1);
  file->AddMatrix(prefix + "lambda", lambda);
}

PldaModel PldaModel::FromFile(const ModelFile &file, const std::string &prefix) {
  PldaModel m;
  m.mu = file.GetVector(prefix + "mu");
  m.u1 = file.GetMatrix(prefix + "u1");
  m.lambda = file.GetMatrix(prefix + "lambda");
  if (m.u1.rows() != m.mu.size() || m.lambda.rows() != m.mu.size() ||
      m.lambda.cols() != m.mu.size())
    throw Error(ErrorCode::kCorruptFile, "inconsistent PLDA tensor shapes");
  return m;
}

}  // namespace psdet
