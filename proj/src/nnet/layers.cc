// psdet/nnet/layers.cc

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

#include "psdet/nnet/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "psdet/error.h"

namespace psdet {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

template <typename T>
void FillNormal(AlignedVector<T> *v, double stddev, std::mt19937_64 *rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (T &x : *v) x = static_cast<T>(normal(*rng));
}

// col is (C * k * k) x (out_h * out_w).
template <typename T>
void Im2Col(const T *x, int channels, int h, int w, int kernel, int stride, int pad,
            int out_h, int out_w, T *col) {
  const int plane = out_h * out_w;
  for (int c = 0; c < channels; c++)
    for (int ki = 0; ki < kernel; ki++)
      for (int kj = 0; kj < kernel; kj++) {
        T *dst = col + static_cast<size_t>((c * kernel + ki) * kernel + kj) * plane;
        for (int oy = 0; oy < out_h; oy++) {
          const int iy = oy * stride - pad + ki;
          T *row = dst + oy * out_w;
          if (iy < 0 || iy >= h) {
            std::fill(row, row + out_w, T(0));
            continue;
          }
          const T *src = x + (static_cast<size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < out_w; ox++) {
            const int ix = ox * stride - pad + kj;
            row[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
          }
        }
      }
}

template <typename T>
void Col2ImAdd(const T *col, int channels, int h, int w, int kernel, int stride, int pad,
               int out_h, int out_w, T *x) {
  const int plane = out_h * out_w;
  for (int c = 0; c < channels; c++)
    for (int ki = 0; ki < kernel; ki++)
      for (int kj = 0; kj < kernel; kj++) {
        const T *src = col + static_cast<size_t>((c * kernel + ki) * kernel + kj) * plane;
        for (int oy = 0; oy < out_h; oy++) {
          const int iy = oy * stride - pad + ki;
          if (iy < 0 || iy >= h) continue;
          T *dst = x + (static_cast<size_t>(c) * h + iy) * w;
          const T *row = src + oy * out_w;
          for (int ox = 0; ox < out_w; ox++) {
            const int ix = ox * stride - pad + kj;
            if (ix >= 0 && ix < w) dst[ix] += row[ox];
          }
        }
      }
}

template <typename T>
T Sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const std::string &name, int in_channels, int out_channels, int kernel,
                  int stride, int pad)
    : weight(name + ".weight",
             {static_cast<uint32_t>(out_channels),
              static_cast<uint32_t>(in_channels * kernel * kernel)}),
      in_channels_(in_channels), out_channels_(out_channels), kernel_(kernel),
      stride_(stride), pad_(pad) {}

template <typename T>
void Conv2d<T>::InitHeNormal(std::mt19937_64 *rng) {
  FillNormal(&weight.value, std::sqrt(2.0 / (in_channels_ * kernel_ * kernel_)), rng);
}

template <typename T>
Tensor4<T> Conv2d<T>::Infer(const Tensor4<T> &x) const {
  if (x.c != in_channels_)
    throw Error(ErrorCode::kDimensionMismatch,
                weight.name + ": input has " + std::to_string(x.c) + " channels, expected " +
                    std::to_string(in_channels_));
  const int oh = OutSize(x.h), ow = OutSize(x.w);
  Tensor4<T> y(x.n, out_channels_, oh, ow);
  const int k_rows = in_channels_ * kernel_ * kernel_;
  const bool pointwise = kernel_ == 1 && stride_ == 1 && pad_ == 0;
  AlignedVector<T> col(pointwise ? 0 : static_cast<size_t>(k_rows) * oh * ow);
  ConstMatMap<T> wmat(weight.value.data(), out_channels_, k_rows);
  for (int i = 0; i < x.n; i++) {
    const T *src = x.Sample(i);
    if (!pointwise) {
      Im2Col(src, x.c, x.h, x.w, kernel_, stride_, pad_, oh, ow, col.data());
      src = col.data();
    }
    MatMap<T>(y.Sample(i), out_channels_, oh * ow).noalias() =
        wmat * ConstMatMap<T>(src, k_rows, oh * ow);
  }
  return y;
}

template <typename T>
Tensor4<T> Conv2d<T>::Forward(const Tensor4<T> &x) {
  input_ = x;
  return Infer(x);
}

template <typename T>
Tensor4<T> Conv2d<T>::Backward(const Tensor4<T> &dy) {
  const Tensor4<T> &x = input_;
  const int oh = dy.h, ow = dy.w;
  const int k_rows = in_channels_ * kernel_ * kernel_;
  const bool pointwise = kernel_ == 1 && stride_ == 1 && pad_ == 0;
  Tensor4<T> dx(x.n, x.c, x.h, x.w);
  AlignedVector<T> col(static_cast<size_t>(k_rows) * oh * ow);
  AlignedVector<T> dcol(pointwise ? 0 : col.size());
  ConstMatMap<T> wmat(weight.value.data(), out_channels_, k_rows);
  MatMap<T> dw(weight.grad.data(), out_channels_, k_rows);
  for (int i = 0; i < x.n; i++) {
    ConstMatMap<T> dyi(dy.Sample(i), out_channels_, oh * ow);
    const T *src = x.Sample(i);
    if (!pointwise) {
      Im2Col(src, x.c, x.h, x.w, kernel_, stride_, pad_, oh, ow, col.data());
      src = col.data();
    }
    dw.noalias() += dyi * ConstMatMap<T>(src, k_rows, oh * ow).transpose();
    if (pointwise) {
      MatMap<T>(dx.Sample(i), k_rows, oh * ow).noalias() = wmat.transpose() * dyi;
    } else {
      MatMap<T>(dcol.data(), k_rows, oh * ow).noalias() = wmat.transpose() * dyi;
      Col2ImAdd(dcol.data(), x.c, x.h, x.w, kernel_, stride_, pad_, oh, ow, dx.Sample(i));
    }
  }
  input_ = Tensor4<T>();
  return dx;
}

// ----------------------------------------------------------- BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(const std::string &name, int channels, T gamma_init)
    : gamma(name + ".gamma", {static_cast<uint32_t>(channels)}),
      beta(name + ".beta", {static_cast<uint32_t>(channels)}),
      running_mean(name + ".running_mean", {static_cast<uint32_t>(channels)}, false),
      running_var(name + ".running_var", {static_cast<uint32_t>(channels)}, false) {
  std::fill(gamma.value.begin(), gamma.value.end(), gamma_init);
  std::fill(running_var.value.begin(), running_var.value.end(), T(1));
}

template <typename T>
void BatchNorm2d<T>::CollectParams(std::vector<Param<T> *> *out) {
  out->push_back(&gamma);
  out->push_back(&beta);
  out->push_back(&running_mean);
  out->push_back(&running_var);
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::Infer(const Tensor4<T> &x) const {
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  const size_t plane = x.PlaneSize();
  for (int c = 0; c < x.c; c++) {
    const T scale = gamma.value[c] / std::sqrt(running_var.value[c] + T(kEps));
    const T shift = beta.value[c] - running_mean.value[c] * scale;
    for (int i = 0; i < x.n; i++) {
      const T *src = x.Plane(i, c);
      T *dst = y.Plane(i, c);
      for (size_t j = 0; j < plane; j++) dst[j] = src[j] * scale + shift;
    }
  }
  return y;
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::Forward(const Tensor4<T> &x) {
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  xhat_ = Tensor4<T>(x.n, x.c, x.h, x.w);
  inv_std_.assign(x.c, T(0));
  const size_t plane = x.PlaneSize();
  const double count = static_cast<double>(plane) * x.n;
  for (int c = 0; c < x.c; c++) {
    double sum = 0.0;
    for (int i = 0; i < x.n; i++) {
      const T *src = x.Plane(i, c);
      for (size_t j = 0; j < plane; j++) sum += src[j];
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int i = 0; i < x.n; i++) {
      const T *src = x.Plane(i, c);
      for (size_t j = 0; j < plane; j++) {
        const double d = src[j] - mean;
        sq += d * d;
      }
    }
    const double var = sq / count;
    const T inv_std = static_cast<T>(1.0 / std::sqrt(var + kEps));
    inv_std_[c] = inv_std;
    const T m = static_cast<T>(mean), g = gamma.value[c], b = beta.value[c];
    for (int i = 0; i < x.n; i++) {
      const T *src = x.Plane(i, c);
      T *xh = xhat_.Plane(i, c);
      T *dst = y.Plane(i, c);
      for (size_t j = 0; j < plane; j++) {
        xh[j] = (src[j] - m) * inv_std;
        dst[j] = g * xh[j] + b;
      }
    }
    const double unbiased = count > 1 ? var * count / (count - 1) : var;
    running_mean.value[c] =
        static_cast<T>((1.0 - kMomentum) * running_mean.value[c] + kMomentum * mean);
    running_var.value[c] =
        static_cast<T>((1.0 - kMomentum) * running_var.value[c] + kMomentum * unbiased);
  }
  return y;
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::Backward(const Tensor4<T> &dy) {
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  const size_t plane = dy.PlaneSize();
  const double count = static_cast<double>(plane) * dy.n;
  for (int c = 0; c < dy.c; c++) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int i = 0; i < dy.n; i++) {
      const T *g = dy.Plane(i, c);
      const T *xh = xhat_.Plane(i, c);
      for (size_t j = 0; j < plane; j++) {
        sum_dy += g[j];
        sum_dy_xhat += static_cast<double>(g[j]) * xh[j];
      }
    }
    gamma.grad[c] += static_cast<T>(sum_dy_xhat);
    beta.grad[c] += static_cast<T>(sum_dy);
    // dx = gamma * inv_std / M * (M dy - sum(dy) - xhat sum(dy xhat))
    const T k = static_cast<T>(gamma.value[c] * inv_std_[c] / count);
    const T mean_term = static_cast<T>(sum_dy), xhat_term = static_cast<T>(sum_dy_xhat);
    const T m = static_cast<T>(count);
    for (int i = 0; i < dy.n; i++) {
      const T *g = dy.Plane(i, c);
      const T *xh = xhat_.Plane(i, c);
      T *dst = dx.Plane(i, c);
      for (size_t j = 0; j < plane; j++)
        dst[j] = k * (m * g[j] - mean_term - xh[j] * xhat_term);
    }
  }
  xhat_ = Tensor4<T>();
  return dx;
}

// ------------------------------------------------------------------ Relu

template <typename T>
Tensor4<T> Relu<T>::Infer(const Tensor4<T> &x) const {
  Tensor4<T> y = x;
  for (T &v : y.data) v = std::max(v, T(0));
  return y;
}

template <typename T>
Tensor4<T> Relu<T>::Forward(const Tensor4<T> &x) {
  output_ = Infer(x);
  return output_;
}

template <typename T>
Tensor4<T> Relu<T>::Backward(const Tensor4<T> &dy) const {
  Tensor4<T> dx = dy;
  for (size_t i = 0; i < dx.size(); i++)
    if (!(output_.data[i] > T(0))) dx.data[i] = T(0);
  return dx;
}

// --------------------------------------------------------------- MaxPool

template <typename T>
Tensor4<T> MaxPool<T>::Run(const Tensor4<T> &x, std::vector<int> *argmax) const {
  const int oh = OutSize(x.h), ow = OutSize(x.w);
  Tensor4<T> y(x.n, x.c, oh, ow);
  if (argmax) argmax->assign(y.size(), 0);
  size_t out_idx = 0;
  for (int i = 0; i < x.n; i++)
    for (int c = 0; c < x.c; c++) {
      const T *src = x.Plane(i, c);
      for (int oy = 0; oy < oh; oy++)
        for (int ox = 0; ox < ow; ox++, out_idx++) {
          T best = -std::numeric_limits<T>::infinity();
          int best_idx = 0;
          for (int ky = 0; ky < 3; ky++) {
            const int iy = 2 * oy - 1 + ky;
            if (iy < 0 || iy >= x.h) continue;
            for (int kx = 0; kx < 3; kx++) {
              const int ix = 2 * ox - 1 + kx;
              if (ix < 0 || ix >= x.w) continue;
              if (src[iy * x.w + ix] > best) {
                best = src[iy * x.w + ix];
                best_idx = iy * x.w + ix;
              }
            }
          }
          y.data[out_idx] = best;
          if (argmax) (*argmax)[out_idx] = best_idx;
        }
    }
  return y;
}

template <typename T>
Tensor4<T> MaxPool<T>::Forward(const Tensor4<T> &x) {
  in_h_ = x.h;
  in_w_ = x.w;
  return Run(x, &argmax_);
}

template <typename T>
Tensor4<T> MaxPool<T>::Backward(const Tensor4<T> &dy) const {
  Tensor4<T> dx(dy.n, dy.c, in_h_, in_w_);
  const size_t out_plane = dy.PlaneSize();
  for (int i = 0; i < dy.n; i++)
    for (int c = 0; c < dy.c; c++) {
      const size_t base = (static_cast<size_t>(i) * dy.c + c) * out_plane;
      T *dst = dx.Plane(i, c);
      for (size_t j = 0; j < out_plane; j++) dst[argmax_[base + j]] += dy.data[base + j];
    }
  return dx;
}

// --------------------------------------------------------------- AvgPool

template <typename T>
Tensor4<T> AvgPool<T>::Infer(const Tensor4<T> &x) const {
  const int oh = OutSize(x.h), ow = OutSize(x.w);
  Tensor4<T> y(x.n, x.c, oh, ow);
  for (int i = 0; i < x.n; i++)
    for (int c = 0; c < x.c; c++) {
      const T *src = x.Plane(i, c);
      T *dst = y.Plane(i, c);
      for (int oy = 0; oy < oh; oy++)
        for (int ox = 0; ox < ow; ox++) {
          T sum = 0;
          int count = 0;
          for (int iy = 2 * oy; iy < std::min(2 * oy + 2, x.h); iy++)
            for (int ix = 2 * ox; ix < std::min(2 * ox + 2, x.w); ix++) {
              sum += src[iy * x.w + ix];
              count++;
            }
          dst[oy * ow + ox] = sum / static_cast<T>(count);
        }
    }
  return y;
}

template <typename T>
Tensor4<T> AvgPool<T>::Forward(const Tensor4<T> &x) {
  in_h_ = x.h;
  in_w_ = x.w;
  return Infer(x);
}

template <typename T>
Tensor4<T> AvgPool<T>::Backward(const Tensor4<T> &dy) const {
  Tensor4<T> dx(dy.n, dy.c, in_h_, in_w_);
  for (int i = 0; i < dy.n; i++)
    for (int c = 0; c < dy.c; c++) {
      const T *src = dy.Plane(i, c);
      T *dst = dx.Plane(i, c);
      for (int oy = 0; oy < dy.h; oy++)
        for (int ox = 0; ox < dy.w; ox++) {
          const int y1 = std::min(2 * oy + 2, in_h_), x1 = std::min(2 * ox + 2, in_w_);
          const T share = src[oy * dy.w + ox] /
                          static_cast<T>((y1 - 2 * oy) * (x1 - 2 * ox));
          for (int iy = 2 * oy; iy < y1; iy++)
            for (int ix = 2 * ox; ix < x1; ix++) dst[iy * in_w_ + ix] += share;
        }
    }
  return dx;
}

// --------------------------------------------------------------- SeBlock

template <typename T>
SeBlock<T>::SeBlock(const std::string &name, int channels, int reduction)
    : channels_(channels) {
  if (reduction < 1 || channels % reduction != 0 || channels / reduction < 1)
    throw Error(ErrorCode::kDimensionMismatch,
                name + ": SE reduction " + std::to_string(reduction) +
                    " does not divide " + std::to_string(channels) + " channels");
  hidden_ = channels / reduction;
  const auto c = static_cast<uint32_t>(channels), h = static_cast<uint32_t>(hidden_);
  w1 = Param<T>(name + ".fc1.weight", {h, c});
  b1 = Param<T>(name + ".fc1.bias", {h});
  w2 = Param<T>(name + ".fc2.weight", {c, h});
  b2 = Param<T>(name + ".fc2.bias", {c});
}

template <typename T>
void SeBlock<T>::InitHeNormal(std::mt19937_64 *rng) {
  FillNormal(&w1.value, std::sqrt(2.0 / channels_), rng);
  FillNormal(&w2.value, std::sqrt(2.0 / hidden_), rng);
}

template <typename T>
void SeBlock<T>::CollectParams(std::vector<Param<T> *> *out) {
  out->push_back(&w1);
  out->push_back(&b1);
  out->push_back(&w2);
  out->push_back(&b2);
}

template <typename T>
void SeBlock<T>::Excite(const Tensor4<T> &x, std::vector<T> *pooled, std::vector<T> *hidden,
                        std::vector<T> *scales) const {
  if (x.c != channels_)
    throw Error(ErrorCode::kDimensionMismatch,
                "SE block expects " + std::to_string(channels_) + " channels, got " +
                    std::to_string(x.c));
  const size_t plane = x.PlaneSize();
  pooled->assign(static_cast<size_t>(x.n) * channels_, T(0));
  hidden->assign(static_cast<size_t>(x.n) * hidden_, T(0));
  scales->assign(static_cast<size_t>(x.n) * channels_, T(0));
  for (int i = 0; i < x.n; i++) {
    T *z = pooled->data() + i * channels_;
    for (int c = 0; c < channels_; c++) {
      const T *src = x.Plane(i, c);
      double sum = 0.0;
      for (size_t j = 0; j < plane; j++) sum += src[j];
      z[c] = static_cast<T>(sum / static_cast<double>(plane));
    }
    T *a = hidden->data() + i * hidden_;
    for (int k = 0; k < hidden_; k++) {
      T acc = b1.value[k];
      for (int c = 0; c < channels_; c++) acc += w1.value[k * channels_ + c] * z[c];
      a[k] = acc;
    }
    T *s = scales->data() + i * channels_;
    for (int c = 0; c < channels_; c++) {
      T acc = b2.value[c];
      for (int k = 0; k < hidden_; k++) acc += w2.value[c * hidden_ + k] * std::max(a[k], T(0));
      s[c] = Sigmoid(acc);
    }
  }
}

template <typename T>
std::vector<T> SeBlock<T>::Scales(const Tensor4<T> &x) const {
  std::vector<T> pooled, hidden, scales;
  Excite(x, &pooled, &hidden, &scales);
  return scales;
}

template <typename T>
Tensor4<T> SeBlock<T>::Infer(const Tensor4<T> &x) const {
  std::vector<T> pooled, hidden, scales;
  Excite(x, &pooled, &hidden, &scales);
  Tensor4<T> y = x;
  const size_t plane = x.PlaneSize();
  for (int i = 0; i < x.n; i++)
    for (int c = 0; c < x.c; c++) {
      const T s = scales[i * channels_ + c];
      T *dst = y.Plane(i, c);
      for (size_t j = 0; j < plane; j++) dst[j] *= s;
    }
  return y;
}

template <typename T>
Tensor4<T> SeBlock<T>::Forward(const Tensor4<T> &x) {
  input_ = x;
  Excite(x, &pooled_, &hidden_pre_, &scales_);
  Tensor4<T> y = x;
  const size_t plane = x.PlaneSize();
  for (int i = 0; i < x.n; i++)
    for (int c = 0; c < x.c; c++) {
      const T s = scales_[i * channels_ + c];
      T *dst = y.Plane(i, c);
      for (size_t j = 0; j < plane; j++) dst[j] *= s;
    }
  return y;
}

template <typename T>
Tensor4<T> SeBlock<T>::Backward(const Tensor4<T> &dy) {
  const Tensor4<T> &x = input_;
  Tensor4<T> dx(x.n, x.c, x.h, x.w);
  const size_t plane = x.PlaneSize();
  std::vector<T> du(channels_), da(hidden_), dz(channels_);
  for (int i = 0; i < x.n; i++) {
    const T *s = scales_.data() + i * channels_;
    const T *a = hidden_pre_.data() + i * hidden_;
    const T *z = pooled_.data() + i * channels_;
    for (int c = 0; c < channels_; c++) {
      const T *g = dy.Plane(i, c);
      const T *src = x.Plane(i, c);
      double ds = 0.0;
      for (size_t j = 0; j < plane; j++) ds += static_cast<double>(g[j]) * src[j];
      du[c] = static_cast<T>(ds) * s[c] * (T(1) - s[c]);
    }
    std::fill(da.begin(), da.end(), T(0));
    for (int c = 0; c < channels_; c++) {
      b2.grad[c] += du[c];
      for (int k = 0; k < hidden_; k++) {
        w2.grad[c * hidden_ + k] += du[c] * std::max(a[k], T(0));
        da[k] += w2.value[c * hidden_ + k] * du[c];
      }
    }
    std::fill(dz.begin(), dz.end(), T(0));
    for (int k = 0; k < hidden_; k++) {
      if (!(a[k] > T(0))) continue;
      b1.grad[k] += da[k];
      for (int c = 0; c < channels_; c++) {
        w1.grad[k * channels_ + c] += da[k] * z[c];
        dz[c] += w1.value[k * channels_ + c] * da[k];
      }
    }
    for (int c = 0; c < channels_; c++) {
      const T *g = dy.Plane(i, c);
      T *dst = dx.Plane(i, c);
      const T spread = dz[c] / static_cast<T>(plane);
      for (size_t j = 0; j < plane; j++) dst[j] = g[j] * s[c] + spread;
    }
  }
  input_ = Tensor4<T>();
  return dx;
}

// ---------------------------------------------------------- StatsPooling

template <typename T>
Tensor4<T> StatsPooling<T>::Run(const Tensor4<T> &x, std::vector<T> *mean_out,
                                std::vector<T> *std_out) const {
  const int rows = x.c * x.h;
  Tensor4<T> y(x.n, 2 * rows, 1, 1);
  if (mean_out) mean_out->assign(static_cast<size_t>(x.n) * rows, T(0));
  if (std_out) std_out->assign(static_cast<size_t>(x.n) * rows, T(0));
  for (int i = 0; i < x.n; i++) {
    const T *src = x.Sample(i);
    T *dst = y.Sample(i);
    for (int r = 0; r < rows; r++) {
      const T *row = src + static_cast<size_t>(r) * x.w;
      double sum = 0.0;
      for (int t = 0; t < x.w; t++) sum += row[t];
      const double mean = sum / x.w;
      double sq = 0.0;
      for (int t = 0; t < x.w; t++) sq += (row[t] - mean) * (row[t] - mean);
      const double stddev = std::sqrt(sq / x.w + kVarianceFloor);
      dst[r] = static_cast<T>(mean);
      dst[rows + r] = static_cast<T>(stddev);
      if (mean_out) (*mean_out)[i * rows + r] = static_cast<T>(mean);
      if (std_out) (*std_out)[i * rows + r] = static_cast<T>(stddev);
    }
  }
  return y;
}

template <typename T>
Tensor4<T> StatsPooling<T>::Forward(const Tensor4<T> &x) {
  input_ = x;
  return Run(x, &mean_, &stddev_);
}

template <typename T>
Tensor4<T> StatsPooling<T>::Backward(const Tensor4<T> &dy) const {
  const Tensor4<T> &x = input_;
  Tensor4<T> dx(x.n, x.c, x.h, x.w);
  const int rows = x.c * x.h;
  const T inv_t = T(1) / static_cast<T>(x.w);
  for (int i = 0; i < x.n; i++) {
    const T *g = dy.Sample(i);
    for (int r = 0; r < rows; r++) {
      const T *row = x.Sample(i) + static_cast<size_t>(r) * x.w;
      T *dst = dx.Sample(i) + static_cast<size_t>(r) * x.w;
      const T mean = mean_[i * rows + r], stddev = stddev_[i * rows + r];
      const T dmean = g[r] * inv_t, dstd = g[rows + r] * inv_t / stddev;
      for (int t = 0; t < x.w; t++) dst[t] = dmean + dstd * (row[t] - mean);
    }
  }
  return dx;
}

// ---------------------------------------------------------------- Linear

template <typename T>
Linear<T>::Linear(const std::string &name, int in, int out)
    : weight(name + ".weight", {static_cast<uint32_t>(out), static_cast<uint32_t>(in)}),
      bias(name + ".bias", {static_cast<uint32_t>(out)}), in_(in), out_(out) {}

template <typename T>
void Linear<T>::InitHeNormal(std::mt19937_64 *rng) {
  FillNormal(&weight.value, std::sqrt(2.0 / in_), rng);
}

template <typename T>
void Linear<T>::CollectParams(std::vector<Param<T> *> *out) {
  out->push_back(&weight);
  out->push_back(&bias);
}

template <typename T>
Tensor4<T> Linear<T>::Infer(const Tensor4<T> &x) const {
  if (static_cast<int>(x.SampleSize()) != in_)
    throw Error(ErrorCode::kDimensionMismatch,
                weight.name + ": input size " + std::to_string(x.SampleSize()) +
                    ", expected " + std::to_string(in_));
  Tensor4<T> y(x.n, out_, 1, 1);
  ConstMatMap<T> xm(x.data.data(), x.n, in_);
  MatMap<T> ym(y.data.data(), x.n, out_);
  ym.noalias() = xm * ConstMatMap<T>(weight.value.data(), out_, in_).transpose();
  ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.value.data(), out_);
  return y;
}

template <typename T>
Tensor4<T> Linear<T>::Forward(const Tensor4<T> &x) {
  input_ = x;
  return Infer(x);
}

template <typename T>
Tensor4<T> Linear<T>::Backward(const Tensor4<T> &dy) {
  const Tensor4<T> &x = input_;
  ConstMatMap<T> xm(x.data.data(), x.n, in_);
  ConstMatMap<T> dym(dy.data.data(), dy.n, out_);
  MatMap<T>(weight.grad.data(), out_, in_).noalias() += dym.transpose() * xm;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.grad.data(), out_) +=
      dym.colwise().sum();
  Tensor4<T> dx(x.n, x.c, x.h, x.w);
  MatMap<T>(dx.data.data(), x.n, in_).noalias() =
      dym * ConstMatMap<T>(weight.value.data(), out_, in_);
  input_ = Tensor4<T>();
  return dx;
}

// --------------------------------------------------------- ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(const std::string &name, int in_channels, int out_channels,
                                int stride, bool se_enabled, int se_reduction)
    : conv1(name + ".conv1", in_channels, out_channels, 3, stride, 1),
      conv2(name + ".conv2", out_channels, out_channels, 3, 1, 1),
      bn1(name + ".bn1", out_channels),
      bn2(name + ".bn2", out_channels, T(0)),
      stride_(stride),
      projection_(stride != 1 || in_channels != out_channels),
      se_enabled_(se_enabled) {
  if (projection_) {
    shortcut_conv = Conv2d<T>(name + ".shortcut.conv", in_channels, out_channels, 1, 1, 0);
    shortcut_bn = BatchNorm2d<T>(name + ".shortcut.bn", out_channels);
  }
  if (se_enabled_) se = SeBlock<T>(name + ".se", out_channels, se_reduction);
}

template <typename T>
void ResidualBlock<T>::Init(std::mt19937_64 *rng) {
  conv1.InitHeNormal(rng);
  conv2.InitHeNormal(rng);
  if (projection_) shortcut_conv.InitHeNormal(rng);
  if (se_enabled_) se.InitHeNormal(rng);
}

template <typename T>
void ResidualBlock<T>::CollectParams(std::vector<Param<T> *> *out) {
  conv1.CollectParams(out);
  bn1.CollectParams(out);
  conv2.CollectParams(out);
  bn2.CollectParams(out);
  if (se_enabled_) se.CollectParams(out);
  if (projection_) {
    shortcut_conv.CollectParams(out);
    shortcut_bn.CollectParams(out);
  }
}

template <typename T>
Tensor4<T> ResidualBlock<T>::Infer(const Tensor4<T> &x) const {
  Tensor4<T> h = bn2.Infer(conv2.Infer(relu1_.Infer(bn1.Infer(conv1.Infer(x)))));
  if (se_enabled_) h = se.Infer(h);
  if (projection_) {
    const Tensor4<T> pooled = stride_ == 2 ? shortcut_pool_.Infer(x) : x;
    const Tensor4<T> sc = shortcut_bn.Infer(shortcut_conv.Infer(pooled));
    for (size_t i = 0; i < h.size(); i++) h.data[i] += sc.data[i];
  } else {
    for (size_t i = 0; i < h.size(); i++) h.data[i] += x.data[i];
  }
  return relu_out_.Infer(h);
}

template <typename T>
Tensor4<T> ResidualBlock<T>::Forward(const Tensor4<T> &x) {
  Tensor4<T> h = bn2.Forward(conv2.Forward(relu1_.Forward(bn1.Forward(conv1.Forward(x)))));
  if (se_enabled_) h = se.Forward(h);
  if (projection_) {
    const Tensor4<T> pooled = stride_ == 2 ? shortcut_pool_.Forward(x) : x;
    const Tensor4<T> sc = shortcut_bn.Forward(shortcut_conv.Forward(pooled));
    for (size_t i = 0; i < h.size(); i++) h.data[i] += sc.data[i];
  } else {
    for (size_t i = 0; i < h.size(); i++) h.data[i] += x.data[i];
  }
  return relu_out_.Forward(h);
}

template <typename T>
Tensor4<T> ResidualBlock<T>::Backward(const Tensor4<T> &dy) {
  const Tensor4<T> d = relu_out_.Backward(dy);
  Tensor4<T> dh = se_enabled_ ? se.Backward(d) : d;
  Tensor4<T> dx = conv1.Backward(bn1.Backward(relu1_.Backward(conv2.Backward(bn2.Backward(dh)))));
  if (projection_) {
    Tensor4<T> dsc = shortcut_conv.Backward(shortcut_bn.Backward(d));
    if (stride_ == 2) dsc = shortcut_pool_.Backward(dsc);
    for (size_t i = 0; i < dx.size(); i++) dx.data[i] += dsc.data[i];
  } else {
    for (size_t i = 0; i < dx.size(); i++) dx.data[i] += d.data[i];
  }
  return dx;
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class Relu<float>;
template class Relu<double>;
template class MaxPool<float>;
template class MaxPool<double>;
template class AvgPool<float>;
template class AvgPool<double>;
template class SeBlock<float>;
template class SeBlock<double>;
template class StatsPooling<float>;
template class StatsPooling<double>;
template class Linear<float>;
template class Linear<double>;
template class ResidualBlock<float>;
template class ResidualBlock<double>;

}  // namespace psdet
