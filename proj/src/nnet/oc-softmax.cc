// psdet/nnet/oc-softmax.cc

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

#include "psdet/nnet/oc-softmax.h"

#include <cmath>
#include <string>

#include "psdet/error.h"

namespace psdet {

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

OcSoftmaxResult OcSoftmaxLoss(std::span<const double> scores, std::span<const int> labels,
                              const OcSoftmaxOptions &opts) {
  if (!(opts.m0 > opts.m1))
    throw Error(ErrorCode::kInvalidMargins, "OC-Softmax needs m0 > m1");
  if (scores.empty() || scores.size() != labels.size())
    throw Error(ErrorCode::kShapeMismatch, "scores and labels must be nonempty and aligned");
  const double n = static_cast<double>(scores.size());
  OcSoftmaxResult out;
  out.per_sample.resize(scores.size());
  out.grad.resize(scores.size());
  for (size_t i = 0; i < scores.size(); i++) {
    if (labels[i] != 0 && labels[i] != 1)
      throw Error(ErrorCode::kInvalidConfig, "label " + std::to_string(labels[i]));
    const double sign = labels[i] == 0 ? 1.0 : -1.0;
    const double margin = labels[i] == 0 ? opts.m0 : opts.m1;
    const double z = opts.alpha * (margin - scores[i]) * sign;
    out.per_sample[i] = Softplus(z);
    out.loss += out.per_sample[i];
    // d softplus(z) / dz = sigmoid(z), dz / ds = -alpha * sign.
    const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    out.grad[i] = -sig * opts.alpha * sign / n;
  }
  out.loss /= n;
  return out;
}

}  // namespace psdet
