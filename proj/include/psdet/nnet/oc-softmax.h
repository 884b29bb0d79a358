// psdet/nnet/oc-softmax.h

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

// One-class softmax loss.  With cosine scores s_i = w0^ . x_i^ and labels
// y_i (0 = pristine target class, 1 = spoof),
//
//   L = 1/N sum_i log(1 + exp(alpha (m_{y_i} - s_i) (-1)^{y_i}))
//
// Pristine scores are pulled above m0, spoof scores pushed below m1.

#ifndef PSDET_NNET_OC_SOFTMAX_H_
#define PSDET_NNET_OC_SOFTMAX_H_

#include <span>
#include <vector>

namespace psdet {

struct OcSoftmaxOptions {
  double alpha = 20.0;
  double m0 = 0.9;
  double m1 = 0.2;
};

struct OcSoftmaxResult {
  double loss = 0.0;
  std::vector<double> per_sample;  // softplus terms before averaging
  std::vector<double> grad;        // dL/ds_i
};

// Throws InvalidMargins when m0 <= m1, ShapeMismatch on mismatched or empty
// inputs and InvalidConfig on labels outside {0, 1}.
OcSoftmaxResult OcSoftmaxLoss(std::span<const double> scores, std::span<const int> labels,
                              const OcSoftmaxOptions &opts = OcSoftmaxOptions());

// log(1 + exp(z)) without overflow.
double Softplus(double z);

}  // namespace psdet

#endif  // PSDET_NNET_OC_SOFTMAX_H_
