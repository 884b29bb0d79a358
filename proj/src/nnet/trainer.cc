// psdet/nnet/trainer.cc

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

#include "psdet/nnet/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "psdet/error.h"
#include "psdet/nnet/oc-softmax.h"
#include "psdet/scoring.h"

namespace psdet {

template <typename T>
Tensor4<T> FeaturesToTensor(const FeatureMatrix &features, int start, int len) {
  const int dim = features.Dim(), total = features.NumFrames();
  Tensor4<T> x(1, 1, dim, len);
  const int stop = std::min(total, start + len);
  for (int d = 0; d < dim; d++) {
    T *row = x.Plane(0, 0) + static_cast<size_t>(d) * len;
    for (int t = start; t < stop; t++) row[t - start] = static_cast<T>(features.values(t, d));
  }
  return x;
}

template <typename T>
Tensor4<T> StackBatch(const std::vector<Tensor4<T>> &samples) {
  if (samples.empty()) return Tensor4<T>();
  const Tensor4<T> &first = samples.front();
  Tensor4<T> out(static_cast<int>(samples.size()), first.c, first.h, first.w);
  for (size_t i = 0; i < samples.size(); i++) {
    if (samples[i].c != first.c || samples[i].h != first.h || samples[i].w != first.w ||
        samples[i].n != 1)
      throw Error(ErrorCode::kShapeMismatch, "batch samples differ in shape");
    std::copy(samples[i].data.begin(), samples[i].data.end(),
              out.Sample(static_cast<int>(i)));
  }
  return out;
}

template Tensor4<float> FeaturesToTensor<float>(const FeatureMatrix &, int, int);
template Tensor4<double> FeaturesToTensor<double>(const FeatureMatrix &, int, int);
template Tensor4<float> StackBatch<float>(const std::vector<Tensor4<float>> &);
template Tensor4<double> StackBatch<double>(const std::vector<Tensor4<double>> &);

EmbeddingWindows ExtractEmbeddings(const XResNet<float> &model, const FeatureMatrix &features,
                                   int window, int shift) {
  const int total = features.NumFrames();
  if (total == 0 || features.Dim() == 0)
    throw Error(ErrorCode::kEmptyFeatures, "no frames to embed");
  if (window < 1 || shift < 1)
    throw Error(ErrorCode::kInvalidConfig, "window and shift must be positive");
  EmbeddingWindows out;
  if (total < window) {
    out.padded = true;
    out.starts.push_back(0);
  } else {
    for (int s = 0; s + window <= total; s += shift) out.starts.push_back(s);
  }
  const int dim = model.config().embedding_dim;
  out.embeddings.resize(static_cast<Eigen::Index>(out.starts.size()), dim);
  out.scores.resize(out.starts.size());
  for (size_t k = 0; k < out.starts.size(); k++) {
    const XResNetOutput<float> y =
        model.Infer(FeaturesToTensor<float>(features, out.starts[k], window));
    for (int d = 0; d < dim; d++)
      out.embeddings(static_cast<Eigen::Index>(k), d) = y.embeddings[d];
    out.scores[k] = y.scores[0];
  }
  return out;
}

double CosineUtteranceScore(const XResNet<float> &model, const FeatureMatrix &features,
                            int window, int shift) {
  const EmbeddingWindows w = ExtractEmbeddings(model, features, window, shift);
  double sum = 0.0;
  for (double s : w.scores) sum += s;
  return -sum / static_cast<double>(w.scores.size());
}

std::string NnetTrainResult::LogText() const {
  std::string out;
  char buf[160];
  for (const EpochRecord &r : log) {
    std::snprintf(buf, sizeof(buf), "epoch %d train_loss %.9g dev_eer %.9g%s\n", r.epoch,
                  r.train_loss, r.dev_eer, r.improved ? " best" : "");
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "best_epoch %d\n", best_epoch);
  out += buf;
  return out;
}

namespace {

void CheckBothClasses(const std::vector<LabeledFeatures> &set, const char *what) {
  bool has[2] = {false, false};
  for (const LabeledFeatures &u : set) {
    if (u.label != 0 && u.label != 1)
      throw Error(ErrorCode::kInvalidConfig, "label must be 0 or 1");
    has[u.label] = true;
  }
  if (!has[0] || !has[1])
    throw Error(ErrorCode::kInsufficientData,
                std::string(what) + " set needs both pristine and spoof utterances");
}

double DevEer(const XResNet<float> &model, const std::vector<LabeledFeatures> &dev,
              int window, int shift) {
  std::vector<double> target, nontarget;
  for (const LabeledFeatures &u : dev) {
    const double s = CosineUtteranceScore(model, u.features, window, shift);
    (u.label == 1 ? target : nontarget).push_back(s);
  }
  return ComputeEer(target, nontarget).eer;
}

}  // namespace

NnetTrainResult TrainXResNet(const XResNetConfig &cfg, const std::vector<LabeledFeatures> &train,
                             const std::vector<LabeledFeatures> &dev,
                             const NnetTrainOptions &opts) {
  CheckBothClasses(train, "training");
  CheckBothClasses(dev, "dev");
  if (opts.batch_size < 1 || opts.crop_frames < cfg.MinFrames())
    throw Error(ErrorCode::kInvalidConfig, "bad batch size or crop length");
  for (const LabeledFeatures &u : train)
    if (u.features.Dim() != cfg.input_dim)
      throw Error(ErrorCode::kDimensionMismatch, "training features have the wrong dimension");

  std::mt19937_64 rng(opts.seed);
  XResNet<float> model = XResNet<float>::Build(cfg, rng());
  AdamState<float> adam(opts.adam);
  std::vector<ParamRef<float>> refs;
  for (Param<float> *p : model.Params())
    if (p->trainable) refs.push_back({p->value.data(), p->grad.data(), p->size()});
  const OcSoftmaxOptions loss_opts{cfg.alpha, cfg.m0, cfg.m1};

  NnetTrainResult result;
  result.model = model;
  double best_eer = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= opts.max_epochs; epoch++) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (size_t b = 0; b < order.size(); b += opts.batch_size) {
      const size_t e = std::min(order.size(), b + static_cast<size_t>(opts.batch_size));
      std::vector<Tensor4<float>> crops;
      std::vector<int> labels;
      for (size_t i = b; i < e; i++) {
        const LabeledFeatures &u = train[order[i]];
        const int slack = std::max(0, u.features.NumFrames() - opts.crop_frames);
        const int start = std::uniform_int_distribution<int>(0, slack)(rng);
        const uint64_t mask_seed = rng();
        if (opts.freq_mask) {
          FeatureMatrix crop;
          crop.kind = u.features.kind;
          const int len = std::min(opts.crop_frames, u.features.NumFrames() - start);
          crop.values = Matrix::Zero(opts.crop_frames, u.features.Dim());
          crop.values.topRows(len) = u.features.values.middleRows(start, len);
          crops.push_back(
              FeaturesToTensor<float>(FrequencyMask(crop, opts.mask, mask_seed), 0,
                                      opts.crop_frames));
        } else {
          crops.push_back(FeaturesToTensor<float>(u.features, start, opts.crop_frames));
        }
        labels.push_back(u.label);
      }
      const XResNetOutput<float> out = model.Forward(StackBatch(crops));
      const std::vector<double> scores(out.scores.begin(), out.scores.end());
      const OcSoftmaxResult loss = OcSoftmaxLoss(scores, labels, loss_opts);
      model.ZeroGrad();
      model.Backward(std::vector<float>(loss.grad.begin(), loss.grad.end()));
      adam.Step(refs);
      loss_sum += loss.loss * static_cast<double>(e - b);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.dev_eer = DevEer(model, dev, opts.crop_frames, opts.dev_shift);
    rec.improved = rec.dev_eer < best_eer;
    result.log.push_back(rec);
    if (rec.improved) {
      best_eer = rec.dev_eer;
      result.best_epoch = epoch;
      result.model = model;
      stale = 0;
    } else if (++stale >= std::max(opts.patience, 1)) {
      break;
    }
  }
  result.model.ZeroGrad();
  return result;
}

}  // namespace psdet
