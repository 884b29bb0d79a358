// psdet/nnet/tensor.h

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

#ifndef PSDET_NNET_TENSOR_H_
#define PSDET_NNET_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace psdet {

// Heap storage aligned to Eigen's vector width.  Kernels that map these
// buffers then see the same alignment on every run, which keeps their
// summation order, and hence every result bit, independent of where the
// allocator happened to place the data.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

// Dense N x C x H x W tensor, contiguous in that order.  For spectrogram
// input H is frequency and W is time.
template <typename T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  AlignedVector<T> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {}

  size_t size() const { return data.size(); }
  size_t SampleSize() const { return static_cast<size_t>(c) * h * w; }
  size_t PlaneSize() const { return static_cast<size_t>(h) * w; }
  T *Sample(int i) { return data.data() + i * SampleSize(); }
  const T *Sample(int i) const { return data.data() + i * SampleSize(); }
  T *Plane(int i, int ch) { return Sample(i) + ch * PlaneSize(); }
  const T *Plane(int i, int ch) const { return Sample(i) + ch * PlaneSize(); }
  T &at(int i, int ch, int y, int x) { return Plane(i, ch)[y * w + x]; }
  T at(int i, int ch, int y, int x) const { return Plane(i, ch)[y * w + x]; }
  bool SameShape(const Tensor4 &o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

// A named parameter with its gradient accumulator.  Buffers (batch-norm
// running statistics) are parameters with trainable == false.
template <typename T>
struct Param {
  std::string name;
  std::vector<uint32_t> shape;
  AlignedVector<T> value;
  AlignedVector<T> grad;
  bool trainable = true;

  Param() = default;
  Param(std::string name_, std::vector<uint32_t> shape_, bool trainable_ = true)
      : name(std::move(name_)), shape(std::move(shape_)), trainable(trainable_) {
    size_t n = 1;
    for (uint32_t d : shape) n *= d;
    value.assign(n, T(0));
    grad.assign(trainable ? n : 0, T(0));
  }
  size_t size() const { return value.size(); }
};

}  // namespace psdet

#endif  // PSDET_NNET_TENSOR_H_
