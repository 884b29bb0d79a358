// psdet/nnet/adam.h

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

#ifndef PSDET_NNET_ADAM_H_
#define PSDET_NNET_ADAM_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "psdet/error.h"

namespace psdet {

struct AdamOptions {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-5;
  // Decoupled: p <- p * (1 - lr * weight_decay) before the Adam update.
  double weight_decay = 0.01;
};

template <typename T>
struct ParamRef {
  T *value;
  const T *grad;
  size_t size;
};

// Bias-corrected Adam with decoupled weight decay.  The moment buffers are
// created on the first step and must keep the same layout afterwards.
template <typename T>
class AdamState {
 public:
  explicit AdamState(const AdamOptions &opts = AdamOptions()) : opts_(opts) {}

  void Step(std::span<const ParamRef<T>> params) {
    if (first_moment_.empty()) {
      for (const auto &p : params) {
        first_moment_.emplace_back(p.size, T(0));
        second_moment_.emplace_back(p.size, T(0));
      }
    }
    if (params.size() != first_moment_.size())
      throw Error(ErrorCode::kShapeMismatch, "parameter count changed between steps");
    for (size_t i = 0; i < params.size(); i++)
      if (params[i].size != first_moment_[i].size())
        throw Error(ErrorCode::kShapeMismatch,
                    "parameter " + std::to_string(i) + " changed size");

    step_++;
    const double lr = opts_.learning_rate;
    const T decay = static_cast<T>(1.0 - lr * opts_.weight_decay);
    const T b1 = static_cast<T>(opts_.beta1), b2 = static_cast<T>(opts_.beta2);
    const T c1 = static_cast<T>(1.0 - std::pow(opts_.beta1, static_cast<double>(step_)));
    const T c2 = static_cast<T>(1.0 - std::pow(opts_.beta2, static_cast<double>(step_)));
    const T eps = static_cast<T>(opts_.eps), step_size = static_cast<T>(lr);
    for (size_t i = 0; i < params.size(); i++) {
      T *value = params[i].value;
      const T *grad = params[i].grad;
      T *m = first_moment_[i].data();
      T *v = second_moment_[i].data();
      for (size_t j = 0; j < params[i].size; j++) {
        const T g = grad[j];
        if (opts_.weight_decay != 0.0) value[j] *= decay;
        m[j] = b1 * m[j] + (T(1) - b1) * g;
        v[j] = b2 * v[j] + (T(1) - b2) * g * g;
        const T m_hat = m[j] / c1, v_hat = v[j] / c2;
        value[j] -= step_size * m_hat / (std::sqrt(v_hat) + eps);
      }
    }
  }

  int64_t step() const { return step_; }
  const AdamOptions &options() const { return opts_; }
  const std::vector<std::vector<T>> &first_moment() const { return first_moment_; }
  const std::vector<std::vector<T>> &second_moment() const { return second_moment_; }

 private:
  AdamOptions opts_;
  int64_t step_ = 0;
  std::vector<std::vector<T>> first_moment_, second_moment_;
};

}  // namespace psdet

#endif  // PSDET_NNET_ADAM_H_
