// psdet/nnet/layers.h

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

// Building blocks of the embedding network.  Every layer has three entry
// points:
//   Infer(x)     inference; const, touches no member state.
//   Forward(x)   training mode; caches what Backward needs.
//   Backward(dy) consumes the cache, accumulates parameter gradients and
//                returns the gradient with respect to the input.

#ifndef PSDET_NNET_LAYERS_H_
#define PSDET_NNET_LAYERS_H_

#include <random>
#include <string>
#include <vector>

#include "psdet/nnet/tensor.h"

namespace psdet {

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string &name, int in_channels, int out_channels, int kernel,
         int stride, int pad);

  void InitHeNormal(std::mt19937_64 *rng);
  int OutSize(int in) const { return (in + 2 * pad_ - kernel_) / stride_ + 1; }

  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy);
  void CollectParams(std::vector<Param<T> *> *out) { out->push_back(&weight); }

  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }
  int stride() const { return stride_; }

  // out_channels x (in_channels * kernel * kernel), no bias.
  Param<T> weight;

 private:
  int in_channels_ = 0, out_channels_ = 0, kernel_ = 1, stride_ = 1, pad_ = 0;
  Tensor4<T> input_;
};

template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(const std::string &name, int channels, T gamma_init = T(1));

  // Uses the running statistics.
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  // Uses batch statistics and updates the running ones.
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy);
  void CollectParams(std::vector<Param<T> *> *out);

  Param<T> gamma, beta, running_mean, running_var;
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

 private:
  Tensor4<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class Relu {
 public:
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy) const;

 private:
  Tensor4<T> output_;
};

// 3x3, stride 2, padding 1.
template <typename T>
class MaxPool {
 public:
  static int OutSize(int in) { return (in - 1) / 2 + 1; }
  Tensor4<T> Infer(const Tensor4<T> &x) const { return Run(x, nullptr); }
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy) const;

 private:
  Tensor4<T> Run(const Tensor4<T> &x, std::vector<int> *argmax) const;
  std::vector<int> argmax_;
  int in_h_ = 0, in_w_ = 0;
};

// 2x2, stride 2, ceil mode: a trailing odd row/column is averaged over the
// cells that exist.
template <typename T>
class AvgPool {
 public:
  static int OutSize(int in) { return (in + 1) / 2; }
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy) const;

 private:
  int in_h_ = 0, in_w_ = 0;
};

// Squeeze-and-excitation: s = sigmoid(W2 relu(W1 gap(x) + b1) + b2),
// output_c = s_c * x_c.
template <typename T>
class SeBlock {
 public:
  SeBlock() = default;
  // Throws DimensionMismatch unless reduction divides channels.
  SeBlock(const std::string &name, int channels, int reduction);

  void InitHeNormal(std::mt19937_64 *rng);
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy);
  void CollectParams(std::vector<Param<T> *> *out);

  // Per-sample channel scales, n x c.
  std::vector<T> Scales(const Tensor4<T> &x) const;

  Param<T> w1, b1, w2, b2;  // hidden x C, hidden, C x hidden, C

 private:
  void Excite(const Tensor4<T> &x, std::vector<T> *pooled, std::vector<T> *hidden,
              std::vector<T> *scales) const;
  int channels_ = 0, hidden_ = 0;
  Tensor4<T> input_;
  std::vector<T> pooled_, hidden_pre_, scales_;
};

// Mean and standard deviation over time (W) of every (channel, frequency)
// row.  Output is n x (2 * c * h) x 1 x 1: all means, then all deviations.
template <typename T>
class StatsPooling {
 public:
  static constexpr double kVarianceFloor = 1e-5;
  Tensor4<T> Infer(const Tensor4<T> &x) const { return Run(x, nullptr, nullptr); }
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy) const;

 private:
  Tensor4<T> Run(const Tensor4<T> &x, std::vector<T> *mean, std::vector<T> *stddev) const;
  Tensor4<T> input_;
  std::vector<T> mean_, stddev_;
};

// Fully connected on n x in x 1 x 1 tensors.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string &name, int in, int out);

  void InitHeNormal(std::mt19937_64 *rng);
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy);
  void CollectParams(std::vector<Param<T> *> *out);

  Param<T> weight, bias;  // out x in, out

 private:
  int in_ = 0, out_ = 0;
  Tensor4<T> input_;
};

// Two 3x3 convolutions with batch norm; the second batch norm starts with
// gamma = 0 so the block is an identity map at initialization.  When the
// block changes resolution or width, the shortcut is a 2x2 average pool
// (stride-2 blocks only) followed by a 1x1 convolution and batch norm.
template <typename T>
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(const std::string &name, int in_channels, int out_channels, int stride,
                bool se_enabled, int se_reduction);

  void Init(std::mt19937_64 *rng);
  Tensor4<T> Infer(const Tensor4<T> &x) const;
  Tensor4<T> Forward(const Tensor4<T> &x);
  Tensor4<T> Backward(const Tensor4<T> &dy);
  void CollectParams(std::vector<Param<T> *> *out);

  bool has_projection() const { return projection_; }

  Conv2d<T> conv1, conv2, shortcut_conv;
  BatchNorm2d<T> bn1, bn2, shortcut_bn;
  SeBlock<T> se;

 private:
  int stride_ = 1;
  bool projection_ = false;
  bool se_enabled_ = false;
  Relu<T> relu1_, relu_out_;
  AvgPool<T> shortcut_pool_;
};

}  // namespace psdet

#endif  // PSDET_NNET_LAYERS_H_
