// psdet/sad.cc

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

#include "psdet/sad.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "psdet/error.h"
#include "psdet/nnet/adam.h"

namespace psdet {

namespace {

constexpr int kHidden1 = 500;
constexpr int kHidden2 = 100;
// Frame timestamps are compared with this slack so that k * 0.01 lands on
// the segment boundary it was computed from.
constexpr double kTimeEps = 1e-9;

Matrix HeNormal(int rows, int cols, std::mt19937_64 *rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); i++) m.data()[i] = normal(*rng);
  return m;
}

Matrix Relu(const Matrix &x) { return x.cwiseMax(0.0); }

// Row-wise softmax in place.
void Softmax(Matrix *logits) {
  for (Eigen::Index r = 0; r < logits->rows(); r++) {
    const double mx = logits->row(r).maxCoeff();
    logits->row(r) = (logits->row(r).array() - mx).exp().matrix();
    logits->row(r) /= logits->row(r).sum();
  }
}

Matrix AddBias(Matrix m, const Vector &b) {
  m.rowwise() += b.transpose();
  return m;
}

Matrix NormalizedStack(const FeatureMatrix &mfcc, double mvn_window_s) {
  return StackContext(MvnSliding(mfcc, mvn_window_s));
}

}  // namespace

SadModel SadModel::Zeros() {
  SadModel m;
  m.w1 = Matrix::Zero(kHidden1, kSadInputDim);
  m.w2 = Matrix::Zero(kHidden2, kHidden1);
  m.w3 = Matrix::Zero(2, kHidden2);
  m.b1 = Vector::Zero(kHidden1);
  m.b2 = Vector::Zero(kHidden2);
  m.b3 = Vector::Zero(2);
  return m;
}

SadModel SadModel::Init(uint64_t seed) {
  std::mt19937_64 rng(seed);
  SadModel m = Zeros();
  m.w1 = HeNormal(kHidden1, kSadInputDim, &rng);
  m.w2 = HeNormal(kHidden2, kHidden1, &rng);
  m.w3 = HeNormal(2, kHidden2, &rng);
  return m;
}

bool SadModel::operator==(const SadModel &o) const {
  return w1 == o.w1 && w2 == o.w2 && w3 == o.w3 && b1 == o.b1 && b2 == o.b2 &&
         b3 == o.b3;
}

ModelFile SadModel::ToFile() const {
  ModelFile file(ModelKind::kSad, "layers = 620,500,100,2\n");
  file.AddMatrix("w1", w1);
  file.AddVector("b1", b1);
  file.AddMatrix("w2", w2);
  file.AddVector("b2", b2);
  file.AddMatrix("w3", w3);
  file.AddVector("b3", b3);
  return file;
}

SadModel SadModel::FromFile(const ModelFile &file) {
  if (file.kind() != ModelKind::kSad)
    throw Error(ErrorCode::kVersionMismatch, "not a SAD model file");
  SadModel m;
  m.w1 = file.GetMatrix("w1");
  m.b1 = file.GetVector("b1");
  m.w2 = file.GetMatrix("w2");
  m.b2 = file.GetVector("b2");
  m.w3 = file.GetMatrix("w3");
  m.b3 = file.GetVector("b3");
  if (m.w1.cols() != kSadInputDim || m.w1.rows() != m.b1.size() ||
      m.w2.cols() != m.w1.rows() || m.w2.rows() != m.b2.size() ||
      m.w3.cols() != m.w2.rows() || m.w3.rows() != 2 || m.b3.size() != 2)
    throw Error(ErrorCode::kShapeMismatch, "SAD model layer shapes are inconsistent");
  return m;
}

Matrix StackContext(const FeatureMatrix &mfcc, int context_frames) {
  const int t_max = mfcc.NumFrames(), dim = mfcc.Dim();
  if (t_max == 0) throw Error(ErrorCode::kEmptyFeatures, "no frames to stack");
  const int half = context_frames / 2;
  Matrix out(t_max, dim * context_frames);
  for (int t = 0; t < t_max; t++)
    for (int c = 0; c < context_frames; c++) {
      const int src = std::clamp(t - half + c, 0, t_max - 1);
      out.block(t, c * dim, 1, dim) = mfcc.values.row(src);
    }
  return out;
}

Matrix SadPosteriors(const SadModel &model, const Matrix &stacked) {
  if (stacked.cols() != model.w1.cols())
    throw Error(ErrorCode::kDimensionMismatch,
                "stacked input has " + std::to_string(stacked.cols()) +
                    " columns, SAD expects " + std::to_string(model.w1.cols()));
  Matrix h1 = Relu(AddBias(stacked * model.w1.transpose(), model.b1));
  Matrix h2 = Relu(AddBias(h1 * model.w2.transpose(), model.b2));
  Matrix out = AddBias(h2 * model.w3.transpose(), model.b3);
  Softmax(&out);
  return out;
}

ScoreSeries SadForward(const SadModel &model, const Matrix &stacked) {
  Matrix post = SadPosteriors(model, stacked);
  ScoreSeries series;
  series.shift_frames = 1;
  series.origin = "sad";
  series.values.assign(post.rows(), 0.0);
  for (Eigen::Index t = 0; t < post.rows(); t++) series.values[t] = post(t, 1);
  return series;
}

ScoreSeries SmoothScores(const ScoreSeries &scores, int window_frames) {
  if (scores.empty()) throw Error(ErrorCode::kEmptySeries, "nothing to smooth");
  ScoreSeries out = scores;
  out.values = MovingAverage(scores.values, window_frames);
  return out;
}

SegmentList ScoresToSegments(const ScoreSeries &scores, double threshold,
                             double pad_s, double frame_shift_s) {
  if (scores.empty()) throw Error(ErrorCode::kEmptySeries, "no scores to segment");
  const int n = static_cast<int>(scores.size());
  const double duration = n * frame_shift_s;
  SegmentList padded;
  for (int t = 0; t < n;) {
    if (scores.values[t] <= threshold) {
      t++;
      continue;
    }
    int end = t;
    while (end < n && scores.values[end] > threshold) end++;
    padded.push_back({std::max(0.0, t * frame_shift_s - pad_s),
                      std::min(duration, end * frame_shift_s + pad_s)});
    t = end;
  }
  SegmentList merged;
  for (const Segment &s : padded) {
    if (!merged.empty() && s.start_s <= merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, s.end_s);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

FeatureMatrix ApplyMask(const FeatureMatrix &features, const SegmentList &segments) {
  std::vector<int> keep;
  for (int t = 0; t < features.NumFrames(); t++) {
    const double ts = features.FrameTime(t) + kTimeEps;
    for (const Segment &s : segments)
      if (s.start_s <= ts && ts < s.end_s) {
        keep.push_back(t);
        break;
      }
  }
  if (keep.empty())
    throw Error(ErrorCode::kEmptyResult, "speech mask removed every frame");
  FeatureMatrix out;
  out.kind = features.kind;
  out.frame_shift_s = features.frame_shift_s;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), features.Dim());
  for (size_t i = 0; i < keep.size(); i++) out.values.row(i) = features.values.row(keep[i]);
  return out;
}

std::string FormatSegments(const SegmentList &segments) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  for (const Segment &s : segments) os << s.start_s << '\t' << s.end_s << '\n';
  return os.str();
}

SegmentList DetectSpeech(const SadModel &model, const AudioBuffer &audio,
                         const SadOptions &opts) {
  FeatureMatrix mfcc = ComputeMfcc(audio);
  ScoreSeries post = SadForward(model, NormalizedStack(mfcc, opts.mvn_window_s));
  const int window = static_cast<int>(std::lround(opts.smooth_window_s / kFrameShift));
  return ScoresToSegments(SmoothScores(post, window), opts.threshold, opts.pad_s);
}

std::vector<int> EnergyGateLabels(const AudioBuffer &audio, double range_db) {
  FrameOptions fo;
  Matrix frames = FrameSignal(audio, fo.frame_length_s, fo.hop_s);
  std::vector<double> db(frames.rows());
  double max_db = -1e300;
  for (Eigen::Index t = 0; t < frames.rows(); t++) {
    db[t] = 10.0 * std::log10(frames.row(t).squaredNorm() / frames.cols() + 1e-12);
    max_db = std::max(max_db, db[t]);
  }
  constexpr double kAbsoluteFloorDb = -55.0;
  std::vector<int> labels(db.size());
  for (size_t t = 0; t < db.size(); t++)
    labels[t] = (db[t] > max_db - range_db && db[t] > kAbsoluteFloorDb) ? 1 : 0;
  return labels;
}

SadTrainResult TrainSad(const std::vector<SadTrainingUtterance> &data,
                        const SadTrainOptions &opts) {
  std::vector<Matrix> stacks;
  std::vector<int> labels;
  Eigen::Index total = 0;
  for (const auto &utt : data) {
    if (static_cast<int>(utt.labels.size()) != utt.mfcc.NumFrames())
      throw Error(ErrorCode::kDimensionMismatch, "label count differs from frame count");
    if (utt.mfcc.NumFrames() == 0) continue;
    stacks.push_back(NormalizedStack(utt.mfcc, opts.mvn_window_s));
    labels.insert(labels.end(), utt.labels.begin(), utt.labels.end());
    total += stacks.back().rows();
  }
  const auto n_speech = std::count(labels.begin(), labels.end(), 1);
  if (total == 0 || n_speech == 0 || n_speech == total)
    throw Error(ErrorCode::kInsufficientData,
                "SAD training needs frames of both speech and non-speech");
  Matrix x(total, kSadInputDim);
  Eigen::Index row = 0;
  for (const auto &s : stacks) {
    x.middleRows(row, s.rows()) = s;
    row += s.rows();
  }

  SadTrainResult result;
  result.model = SadModel::Init(opts.seed);
  SadModel &m = result.model;
  AdamOptions adam_opts;
  adam_opts.learning_rate = opts.learning_rate;
  adam_opts.weight_decay = 0.0;
  AdamState<double> adam(adam_opts);
  SadModel grad = SadModel::Zeros();
  std::mt19937_64 rng(opts.seed ^ 0x5ad5ad5ad5ad5adULL);
  std::vector<Eigen::Index> order(total);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < opts.epochs; epoch++) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < total; start += opts.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(opts.batch_size, total - start);
      Matrix xb(bs, kSadInputDim);
      std::vector<int> yb(bs);
      for (Eigen::Index i = 0; i < bs; i++) {
        xb.row(i) = x.row(order[start + i]);
        yb[i] = labels[order[start + i]];
      }
      Matrix z1 = AddBias(xb * m.w1.transpose(), m.b1);
      Matrix h1 = Relu(z1);
      Matrix z2 = AddBias(h1 * m.w2.transpose(), m.b2);
      Matrix h2 = Relu(z2);
      Matrix p = AddBias(h2 * m.w3.transpose(), m.b3);
      Softmax(&p);
      // d(mean CE)/d(logits) = (p - onehot) / bs.
      Matrix d3 = p;
      for (Eigen::Index i = 0; i < bs; i++) {
        loss_sum -= std::log(std::max(p(i, yb[i]), 1e-300));
        d3(i, yb[i]) -= 1.0;
      }
      d3 /= static_cast<double>(bs);
      grad.w3 = d3.transpose() * h2;
      grad.b3 = d3.colwise().sum().transpose();
      Matrix d2 = (d3 * m.w3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
      grad.w2 = d2.transpose() * h1;
      grad.b2 = d2.colwise().sum().transpose();
      Matrix d1 = (d2 * m.w2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
      grad.w1 = d1.transpose() * xb;
      grad.b1 = d1.colwise().sum().transpose();
      const ParamRef<double> refs[] = {
          {m.w1.data(), grad.w1.data(), static_cast<size_t>(m.w1.size())},
          {m.b1.data(), grad.b1.data(), static_cast<size_t>(m.b1.size())},
          {m.w2.data(), grad.w2.data(), static_cast<size_t>(m.w2.size())},
          {m.b2.data(), grad.b2.data(), static_cast<size_t>(m.b2.size())},
          {m.w3.data(), grad.w3.data(), static_cast<size_t>(m.w3.size())},
          {m.b3.data(), grad.b3.data(), static_cast<size_t>(m.b3.size())},
      };
      adam.Step(refs);
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(total));
  }
  return result;
}

double SadFrameAccuracy(const SadModel &model,
                        const std::vector<SadTrainingUtterance> &data,
                        double mvn_window_s) {
  size_t correct = 0, total = 0;
  for (const auto &utt : data) {
    if (utt.mfcc.NumFrames() == 0) continue;
    Matrix post = SadPosteriors(model, NormalizedStack(utt.mfcc, mvn_window_s));
    for (Eigen::Index t = 0; t < post.rows(); t++) {
      const int predicted = post(t, 1) > post(t, 0) ? 1 : 0;
      correct += predicted == utt.labels[t];
      total++;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace psdet
