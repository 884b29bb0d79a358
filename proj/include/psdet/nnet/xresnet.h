// psdet/nnet/xresnet.h

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

// The x-ResNet embedding network:
//
//   stem     3x3 conv (stride 2) -> 3x3 conv -> 3x3 conv, each + BN + ReLU,
//            then an optional 3x3 stride-2 max pool
//   stages   four stages of basic residual blocks; stages 2..4 open with a
//            stride-2 block
//   pooling  mean and standard deviation over time
//   embed    fully connected layer to embedding_dim
//   head     cosine score s = w0 . x / (|w0| |x|)
//
// The input is N x 1 x F x T with F the feature dimension and T frames.
// Every stride-2 layer maps a length L to ceil(L / 2).

#ifndef PSDET_NNET_XRESNET_H_
#define PSDET_NNET_XRESNET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psdet/binary-io.h"
#include "psdet/nnet/layers.h"

namespace psdet {

struct XResNetConfig {
  std::vector<int> blocks_per_stage{2, 2, 2, 2};
  std::vector<int> stage_channels{64, 128, 256, 512};
  double width_multiplier = 1.0;
  bool se_enabled = false;
  int se_reduction = 16;
  int embedding_dim = 64;
  int input_dim = kLfbDim;
  bool stem_max_pool = true;
  // OC-Softmax head.
  double alpha = 20.0;
  double m0 = 0.9;
  double m1 = 0.2;

  // Throws InvalidConfig (or InvalidMargins when m0 <= m1).
  void Validate() const;
  // max(1, round(channels * width_multiplier)).
  int Scaled(int channels) const;
  int MinFrames() const;

  // key=value lines; FromEcho(Echo()) reproduces the config.
  std::string Echo() const;
  static XResNetConfig FromEcho(const std::string &echo);
  bool operator==(const XResNetConfig &) const = default;
};

// Per-sample network outputs.
template <typename T>
struct XResNetOutput {
  int n = 0, dim = 0;
  std::vector<T> embeddings;  // n x dim
  std::vector<T> scores;      // n cosine scores in [-1, 1]
};

template <typename T>
class XResNet {
 public:
  XResNet() = default;
  // Seeded He-normal initialization; the last BN of every residual block
  // starts with gamma = 0.
  static XResNet Build(const XResNetConfig &cfg, uint64_t seed);

  // Batch norm uses running statistics.  Throws InputTooShort when the
  // input has fewer than MinFrames() frames, DimensionMismatch on a wrong
  // feature dimension.
  XResNetOutput<T> Infer(const Tensor4<T> &x) const;
  // Training mode: batch statistics, caches for Backward.
  XResNetOutput<T> Forward(const Tensor4<T> &x);
  // Takes dLoss/dscore per sample, accumulates all parameter gradients and
  // returns dLoss/dinput.
  Tensor4<T> Backward(const std::vector<T> &dscores);

  // Trainable parameters followed by the batch-norm buffers, in a fixed
  // order.
  std::vector<Param<T> *> Params();
  std::vector<const Param<T> *> Params() const;
  void ZeroGrad();
  size_t NumTrainable() const;

  const XResNetConfig &config() const { return cfg_; }

  ModelFile ToFile() const;
  static XResNet FromFile(const ModelFile &file);

  template <typename U>
  XResNet<U> Cast() const {
    XResNet<U> out = XResNet<U>::Build(cfg_, 0);
    auto dst = out.Params();
    auto src = Params();
    for (size_t i = 0; i < src.size(); i++)
      for (size_t j = 0; j < src[i]->value.size(); j++)
        dst[i]->value[j] = static_cast<U>(src[i]->value[j]);
    return out;
  }

  // Stem layers.
  Conv2d<T> stem_conv[3];
  BatchNorm2d<T> stem_bn[3];
  std::vector<ResidualBlock<T>> blocks;
  Linear<T> embedding;
  Param<T> w0;

 private:
  void CheckInput(const Tensor4<T> &x) const;
  XResNetOutput<T> Head(const Tensor4<T> &emb) const;

  XResNetConfig cfg_;
  Relu<T> stem_relu_[3];
  MaxPool<T> pool_;
  StatsPooling<T> stats_;
  // Forward caches for the cosine head.
  Tensor4<T> emb_;
  std::vector<T> scores_;
};

}  // namespace psdet

#endif  // PSDET_NNET_XRESNET_H_
