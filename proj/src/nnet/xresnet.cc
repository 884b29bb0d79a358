// psdet/nnet/xresnet.cc

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

#include "psdet/nnet/xresnet.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "psdet/error.h"

namespace psdet {

namespace {

constexpr double kNormFloor = 1e-12;

std::string JoinInts(const std::vector<int> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); i++) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<int> SplitInts(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int StrideOut(int in) { return (in + 1) / 2; }

}  // namespace

int XResNetConfig::Scaled(int channels) const {
  return std::max(1, static_cast<int>(std::lround(channels * width_multiplier)));
}

int XResNetConfig::MinFrames() const { return 32; }

void XResNetConfig::Validate() const {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (blocks_per_stage.size() != 4) fail("blocks_per_stage must have 4 entries");
  if (stage_channels.size() != 4) fail("stage_channels must have 4 entries");
  for (int b : blocks_per_stage)
    if (b < 1) fail("every stage needs at least one block");
  for (size_t s = 1; s < stage_channels.size(); s++)
    if (stage_channels[s] != 2 * stage_channels[s - 1])
      fail("stage_channels must double from stage to stage");
  if (!(width_multiplier > 0.0)) fail("width_multiplier must be positive");
  if (embedding_dim < 1) fail("embedding_dim must be positive");
  if (input_dim < 1) fail("input_dim must be positive");
  if (se_enabled) {
    if (se_reduction < 1) fail("se_reduction must be positive");
    for (int c : stage_channels)
      if (Scaled(c) % se_reduction != 0)
        fail("se_reduction " + std::to_string(se_reduction) + " does not divide " +
             std::to_string(Scaled(c)) + " channels");
  }
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(m0 > m1) || m0 > 1.0 || m1 < -1.0)
    throw Error(ErrorCode::kInvalidMargins,
                "margins must satisfy -1 <= m1 < m0 <= 1, got m0=" + FormatDouble(m0) +
                    " m1=" + FormatDouble(m1));
}

std::string XResNetConfig::Echo() const {
  std::ostringstream os;
  os << "blocks_per_stage=" << JoinInts(blocks_per_stage) << "\n"
     << "stage_channels=" << JoinInts(stage_channels) << "\n"
     << "width_multiplier=" << FormatDouble(width_multiplier) << "\n"
     << "se_enabled=" << (se_enabled ? 1 : 0) << "\n"
     << "se_reduction=" << se_reduction << "\n"
     << "embedding_dim=" << embedding_dim << "\n"
     << "input_dim=" << input_dim << "\n"
     << "stem_max_pool=" << (stem_max_pool ? 1 : 0) << "\n"
     << "alpha=" << FormatDouble(alpha) << "\n"
     << "m0=" << FormatDouble(m0) << "\n"
     << "m1=" << FormatDouble(m1) << "\n";
  return os.str();
}

XResNetConfig XResNetConfig::FromEcho(const std::string &echo) {
  std::map<std::string, std::string> kv;
  std::istringstream is(echo);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kCorruptFile, "bad config echo line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char *key) -> const std::string & {
    auto it = kv.find(key);
    if (it == kv.end())
      throw Error(ErrorCode::kCorruptFile, std::string("config echo lacks ") + key);
    return it->second;
  };
  XResNetConfig cfg;
  try {
    cfg.blocks_per_stage = SplitInts(get("blocks_per_stage"));
    cfg.stage_channels = SplitInts(get("stage_channels"));
    cfg.width_multiplier = std::stod(get("width_multiplier"));
    cfg.se_enabled = std::stoi(get("se_enabled")) != 0;
    cfg.se_reduction = std::stoi(get("se_reduction"));
    cfg.embedding_dim = std::stoi(get("embedding_dim"));
    cfg.input_dim = std::stoi(get("input_dim"));
    cfg.stem_max_pool = std::stoi(get("stem_max_pool")) != 0;
    cfg.alpha = std::stod(get("alpha"));
    cfg.m0 = std::stod(get("m0"));
    cfg.m1 = std::stod(get("m1"));
  } catch (const std::logic_error &e) {
    throw Error(ErrorCode::kCorruptFile, std::string("malformed config echo: ") + e.what());
  }
  return cfg;
}

template <typename T>
XResNet<T> XResNet<T>::Build(const XResNetConfig &cfg, uint64_t seed) {
  cfg.Validate();
  XResNet<T> net;
  net.cfg_ = cfg;
  std::mt19937_64 rng(seed);

  const int s0 = cfg.Scaled(32), s1 = cfg.Scaled(32), s2 = cfg.Scaled(64);
  net.stem_conv[0] = Conv2d<T>("stem.conv1", 1, s0, 3, 2, 1);
  net.stem_conv[1] = Conv2d<T>("stem.conv2", s0, s1, 3, 1, 1);
  net.stem_conv[2] = Conv2d<T>("stem.conv3", s1, s2, 3, 1, 1);
  for (int i = 0; i < 3; i++) {
    net.stem_bn[i] = BatchNorm2d<T>("stem.bn" + std::to_string(i + 1),
                                    net.stem_conv[i].out_channels());
    net.stem_conv[i].InitHeNormal(&rng);
  }

  int freq = StrideOut(cfg.input_dim);
  if (cfg.stem_max_pool) freq = MaxPool<T>::OutSize(freq);
  int in_ch = s2;
  for (int s = 0; s < 4; s++) {
    const int out_ch = cfg.Scaled(cfg.stage_channels[s]);
    for (int b = 0; b < cfg.blocks_per_stage[s]; b++) {
      const int stride = (s > 0 && b == 0) ? 2 : 1;
      if (stride == 2) freq = StrideOut(freq);
      const std::string name =
          "stage" + std::to_string(s + 1) + ".block" + std::to_string(b + 1);
      net.blocks.emplace_back(name, in_ch, out_ch, stride, cfg.se_enabled, cfg.se_reduction);
      net.blocks.back().Init(&rng);
      in_ch = out_ch;
    }
  }
  net.embedding = Linear<T>("embedding", 2 * in_ch * freq, cfg.embedding_dim);
  net.embedding.InitHeNormal(&rng);
  net.w0 = Param<T>("oc.w0", {static_cast<uint32_t>(cfg.embedding_dim)});
  std::normal_distribution<double> normal(0.0, 1.0);
  for (T &v : net.w0.value) v = static_cast<T>(normal(rng));
  return net;
}

template <typename T>
void XResNet<T>::CheckInput(const Tensor4<T> &x) const {
  if (x.c != 1 || x.h != cfg_.input_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                "network expects 1 x " + std::to_string(cfg_.input_dim) +
                    " x T input, got " + std::to_string(x.c) + " x " + std::to_string(x.h));
  if (x.w < cfg_.MinFrames())
    throw Error(ErrorCode::kInputTooShort,
                std::to_string(x.w) + " frames, need at least " +
                    std::to_string(cfg_.MinFrames()));
  if (x.n < 1) throw Error(ErrorCode::kInputTooShort, "empty batch");
}

template <typename T>
XResNetOutput<T> XResNet<T>::Head(const Tensor4<T> &emb) const {
  XResNetOutput<T> out;
  out.n = emb.n;
  out.dim = cfg_.embedding_dim;
  out.embeddings.assign(emb.data.begin(), emb.data.end());
  out.scores.resize(emb.n);
  double wn = 0.0;
  for (T v : w0.value) wn += static_cast<double>(v) * v;
  wn = std::max(std::sqrt(wn), kNormFloor);
  for (int i = 0; i < emb.n; i++) {
    const T *x = emb.Sample(i);
    double xn = 0.0, dot = 0.0;
    for (int k = 0; k < out.dim; k++) {
      xn += static_cast<double>(x[k]) * x[k];
      dot += static_cast<double>(x[k]) * w0.value[k];
    }
    xn = std::max(std::sqrt(xn), kNormFloor);
    out.scores[i] = static_cast<T>(std::clamp(dot / (xn * wn), -1.0, 1.0));
  }
  return out;
}

template <typename T>
XResNetOutput<T> XResNet<T>::Infer(const Tensor4<T> &x) const {
  CheckInput(x);
  Tensor4<T> h = x;
  for (int i = 0; i < 3; i++)
    h = stem_relu_[i].Infer(stem_bn[i].Infer(stem_conv[i].Infer(h)));
  if (cfg_.stem_max_pool) h = pool_.Infer(h);
  for (const auto &block : blocks) h = block.Infer(h);
  return Head(embedding.Infer(stats_.Infer(h)));
}

template <typename T>
XResNetOutput<T> XResNet<T>::Forward(const Tensor4<T> &x) {
  CheckInput(x);
  Tensor4<T> h = x;
  for (int i = 0; i < 3; i++)
    h = stem_relu_[i].Forward(stem_bn[i].Forward(stem_conv[i].Forward(h)));
  if (cfg_.stem_max_pool) h = pool_.Forward(h);
  for (auto &block : blocks) h = block.Forward(h);
  emb_ = embedding.Forward(stats_.Forward(h));
  XResNetOutput<T> out = Head(emb_);
  scores_ = out.scores;
  return out;
}

template <typename T>
Tensor4<T> XResNet<T>::Backward(const std::vector<T> &dscores) {
  if (static_cast<int>(dscores.size()) != emb_.n)
    throw Error(ErrorCode::kShapeMismatch, "score gradient does not match the batch");
  const int dim = cfg_.embedding_dim;
  double wn = 0.0;
  for (T v : w0.value) wn += static_cast<double>(v) * v;
  wn = std::max(std::sqrt(wn), kNormFloor);
  // ds/dx = (w^ - s x^) / |x|,  ds/dw = (x^ - s w^) / |w|
  Tensor4<T> demb(emb_.n, emb_.c, 1, 1);
  for (int i = 0; i < emb_.n; i++) {
    const T *x = emb_.Sample(i);
    double xn = 0.0;
    for (int k = 0; k < dim; k++) xn += static_cast<double>(x[k]) * x[k];
    xn = std::max(std::sqrt(xn), kNormFloor);
    double dot = 0.0;
    for (int k = 0; k < dim; k++) dot += static_cast<double>(x[k]) * w0.value[k];
    const double s = dot / (xn * wn), ds = dscores[i];
    T *dx = demb.Sample(i);
    for (int k = 0; k < dim; k++) {
      const double xh = x[k] / xn, wh = w0.value[k] / wn;
      dx[k] = static_cast<T>(ds * (wh - s * xh) / xn);
      w0.grad[k] += static_cast<T>(ds * (xh - s * wh) / wn);
    }
  }
  Tensor4<T> d = stats_.Backward(embedding.Backward(demb));
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) d = it->Backward(d);
  if (cfg_.stem_max_pool) d = pool_.Backward(d);
  for (int i = 2; i >= 0; i--)
    d = stem_conv[i].Backward(stem_bn[i].Backward(stem_relu_[i].Backward(d)));
  emb_ = Tensor4<T>();
  return d;
}

template <typename T>
std::vector<Param<T> *> XResNet<T>::Params() {
  std::vector<Param<T> *> out;
  for (int i = 0; i < 3; i++) {
    stem_conv[i].CollectParams(&out);
    stem_bn[i].CollectParams(&out);
  }
  for (auto &block : blocks) block.CollectParams(&out);
  embedding.CollectParams(&out);
  out.push_back(&w0);
  return out;
}

template <typename T>
std::vector<const Param<T> *> XResNet<T>::Params() const {
  auto mutable_params = const_cast<XResNet<T> *>(this)->Params();
  return std::vector<const Param<T> *>(mutable_params.begin(), mutable_params.end());
}

template <typename T>
void XResNet<T>::ZeroGrad() {
  for (Param<T> *p : Params()) std::fill(p->grad.begin(), p->grad.end(), T(0));
}

template <typename T>
size_t XResNet<T>::NumTrainable() const {
  size_t n = 0;
  for (const Param<T> *p : Params())
    if (p->trainable) n += p->size();
  return n;
}

template <typename T>
ModelFile XResNet<T>::ToFile() const {
  ModelFile file(ModelKind::kXResNet, cfg_.Echo());
  for (const Param<T> *p : Params())
    file.Add(p->name, p->shape, std::vector<float>(p->value.begin(), p->value.end()));
  return file;
}

template <typename T>
XResNet<T> XResNet<T>::FromFile(const ModelFile &file) {
  if (file.kind() != ModelKind::kXResNet)
    throw Error(ErrorCode::kVersionMismatch,
                std::string("expected an xresnet model, got ") + ModelKindName(file.kind()));
  XResNet<T> net = Build(XResNetConfig::FromEcho(file.config_echo()), 0);
  for (Param<T> *p : net.Params()) {
    const NamedTensor &t = file.Get(p->name);
    if (t.dims != p->shape)
      throw Error(ErrorCode::kCorruptFile, "tensor " + p->name + " has the wrong shape");
    for (size_t i = 0; i < t.data.size(); i++) p->value[i] = static_cast<T>(t.data[i]);
  }
  return net;
}

template class XResNet<float>;
template class XResNet<double>;

}  // namespace psdet
