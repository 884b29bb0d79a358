// psdet/backend/gmm.cc

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

#include "psdet/backend/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "psdet/error.h"

namespace psdet {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Per-component log(w_k) + log N(x; m_k, diag v_k), written into out.
void ComponentLogLik(const GmmModel &gmm, const std::vector<double> &log_norm,
                     const double *x, double *out) {
  const int k_max = gmm.NumComponents(), dim = gmm.Dim();
  for (int k = 0; k < k_max; k++) {
    const double *m = gmm.means.row(k).data();
    const double *v = gmm.variances.row(k).data();
    double q = 0.0;
    for (int d = 0; d < dim; d++) {
      const double diff = x[d] - m[d];
      q += diff * diff / v[d];
    }
    out[k] = log_norm[k] - 0.5 * q;
  }
}

std::vector<double> LogNorms(const GmmModel &gmm) {
  std::vector<double> out(gmm.NumComponents());
  for (int k = 0; k < gmm.NumComponents(); k++) {
    double logdet = 0.0;
    for (int d = 0; d < gmm.Dim(); d++) logdet += std::log(gmm.variances(k, d));
    const double lw = gmm.weights(k) > 0.0 ? std::log(gmm.weights(k))
                                           : -std::numeric_limits<double>::infinity();
    out[k] = lw - 0.5 * (gmm.Dim() * kLog2Pi + logdet);
  }
  return out;
}

double LogSumExp(const double *v, int n) {
  const double m = *std::max_element(v, v + n);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (int i = 0; i < n; i++) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace

double GmmModel::LogLikelihood(const double *x) const {
  std::vector<double> comp(NumComponents());
  ComponentLogLik(*this, LogNorms(*this), x, comp.data());
  return LogSumExp(comp.data(), NumComponents());
}

double GmmModel::MeanLogLikelihood(const Matrix &frames) const {
  const std::vector<double> log_norm = LogNorms(*this);
  std::vector<double> comp(NumComponents());
  double total = 0.0;
  for (Eigen::Index t = 0; t < frames.rows(); t++) {
    ComponentLogLik(*this, log_norm, frames.row(t).data(), comp.data());
    total += LogSumExp(comp.data(), NumComponents());
  }
  return total / static_cast<double>(frames.rows());
}

GmmTrainResult TrainGmmEm(const Matrix &frames, const GmmTrainOptions &opts) {
  const int n = static_cast<int>(frames.rows()), dim = static_cast<int>(frames.cols());
  const int k_max = opts.n_components;
  if (k_max < 1) throw Error(ErrorCode::kInvalidConfig, "need at least one component");
  if (n < k_max)
    throw Error(ErrorCode::kTooFewFrames,
                std::to_string(n) + " frames for " + std::to_string(k_max) + " components");

  // k-means from k distinct random frames.
  std::mt19937_64 rng(opts.seed);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < k_max; k++)
    std::swap(idx[k], idx[std::uniform_int_distribution<int>(k, n - 1)(rng)]);
  Matrix centers(k_max, dim);
  for (int k = 0; k < k_max; k++) centers.row(k) = frames.row(idx[k]);
  std::vector<int> assign(n, 0);
  for (int it = 0; it <= opts.kmeans_iters; it++) {
    for (int t = 0; t < n; t++) {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < k_max; k++) {
        const double d = (frames.row(t) - centers.row(k)).squaredNorm();
        if (d < best) {
          best = d;
          assign[t] = k;
        }
      }
    }
    if (it == opts.kmeans_iters) break;
    Matrix sums = Matrix::Zero(k_max, dim);
    std::vector<int> counts(k_max, 0);
    for (int t = 0; t < n; t++) {
      sums.row(assign[t]) += frames.row(t);
      counts[assign[t]]++;
    }
    for (int k = 0; k < k_max; k++)
      if (counts[k] > 0) centers.row(k) = sums.row(k) / counts[k];
  }

  const Vector global_mean = frames.colwise().mean().transpose();
  Vector global_var = Vector::Zero(dim);
  for (int t = 0; t < n; t++)
    global_var += (frames.row(t).transpose() - global_mean).cwiseAbs2();
  global_var /= n;

  GmmModel gmm;
  gmm.weights = Vector::Zero(k_max);
  gmm.means = centers;
  gmm.variances = Matrix::Zero(k_max, dim);
  {
    std::vector<int> counts(k_max, 0);
    for (int t = 0; t < n; t++) {
      counts[assign[t]]++;
      gmm.variances.row(assign[t]) += (frames.row(t) - centers.row(assign[t])).cwiseAbs2();
    }
    for (int k = 0; k < k_max; k++) {
      // One pseudo-count keeps every initial weight positive.
      gmm.weights(k) = (counts[k] + 1.0) / (n + k_max);
      if (counts[k] > 1)
        gmm.variances.row(k) /= counts[k];
      else
        gmm.variances.row(k) = global_var.transpose();
      gmm.variances.row(k) = gmm.variances.row(k).cwiseMax(kGmmVarianceFloor);
    }
  }

  GmmTrainResult result;
  std::vector<double> comp(k_max);
  Matrix resp(n, k_max);
  for (int iter = 0; iter <= opts.n_iters; iter++) {
    // E-step; the log-likelihood is that of the current parameters.
    const std::vector<double> log_norm = LogNorms(gmm);
    double total = 0.0;
    for (int t = 0; t < n; t++) {
      ComponentLogLik(gmm, log_norm, frames.row(t).data(), comp.data());
      const double lse = LogSumExp(comp.data(), k_max);
      total += lse;
      for (int k = 0; k < k_max; k++) resp(t, k) = std::exp(comp[k] - lse);
    }
    result.log_likelihood.push_back(total / n);
    if (iter == opts.n_iters) break;

    // M-step.
    const Vector occ = resp.colwise().sum().transpose();
    for (int k = 0; k < k_max; k++) {
      gmm.weights(k) = occ(k) / n;
      if (!(occ(k) > 0.0)) continue;  // keep the old mean and variance
      Vector m = Vector::Zero(dim);
      for (int t = 0; t < n; t++) m += resp(t, k) * frames.row(t).transpose();
      m /= occ(k);
      Vector v = Vector::Zero(dim);
      for (int t = 0; t < n; t++) v += resp(t, k) * (frames.row(t).transpose() - m).cwiseAbs2();
      v /= occ(k);
      gmm.means.row(k) = m.transpose();
      gmm.variances.row(k) = v.cwiseMax(kGmmVarianceFloor).transpose();
    }
  }
  result.model = gmm;
  return result;
}

ScoreSeries GmmFrameLlr(const GmmModel &spoof, const GmmModel &pristine,
                        const FeatureMatrix &features) {
  if (spoof.Dim() != features.Dim() || pristine.Dim() != features.Dim())
    throw Error(ErrorCode::kDimensionMismatch,
                "GMM dimension does not match " + std::to_string(features.Dim()) +
                    "-dim features");
  const std::vector<double> ns = LogNorms(spoof), np = LogNorms(pristine);
  std::vector<double> cs(spoof.NumComponents()), cp(pristine.NumComponents());
  ScoreSeries out;
  out.shift_frames = 1;
  out.origin = "gmm";
  out.values.resize(features.NumFrames());
  for (int t = 0; t < features.NumFrames(); t++) {
    const double *x = features.values.row(t).data();
    ComponentLogLik(spoof, ns, x, cs.data());
    ComponentLogLik(pristine, np, x, cp.data());
    out.values[t] = LogSumExp(cs.data(), spoof.NumComponents()) -
                    LogSumExp(cp.data(), pristine.NumComponents());
  }
  return out;
}

void GmmModel::AddTo(ModelFile *file, const std::string &prefix) const {
  file->AddVector(prefix + "weights", weights);
  file->AddMatrix(prefix + "means", means);
  file->AddMatrix(prefix + "variances", variances);
}

GmmModel GmmModel::FromFile(const ModelFile &file, const std::string &prefix) {
  GmmModel g;
  g.weights = file.GetVector(prefix + "weights");
  g.means = file.GetMatrix(prefix + "means");
  g.variances = file.GetMatrix(prefix + "variances");
  if (g.means.rows() != g.weights.size() || g.variances.rows() != g.means.rows() ||
      g.variances.cols() != g.means.cols())
    throw Error(ErrorCode::kCorruptFile, "inconsistent GMM tensor shapes");
  return g;
}

}  // namespace psdet
