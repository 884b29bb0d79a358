// psdet/tests/nnet-test.cc

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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "doctest.h"
#include "psdet/error.h"
#include "psdet/nnet/adam.h"
#include "psdet/nnet/layers.h"
#include "psdet/nnet/oc-softmax.h"
#include "psdet/nnet/trainer.h"
#include "psdet/nnet/xresnet.h"
#include "test-util.h"

namespace psdet {
namespace {

XResNetConfig TinyConfig() {
  XResNetConfig cfg;
  cfg.blocks_per_stage = {1, 1, 1, 1};
  cfg.width_multiplier = 1.0 / 32;
  cfg.se_reduction = 2;
  return cfg;
}

template <typename T>
Tensor4<T> RandomTensor(int n, int c, int h, int w, uint64_t seed, double lo = -1.0,
                        double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor4<T> x(n, c, h, w);
  for (T &v : x.data) v = static_cast<T>(u(rng));
  return x;
}

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Moves batch-norm affine parameters and SE biases away from their
// initial values so no gradient path is trivially zero.
template <typename T>
void Perturb(XResNet<T> *net, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gamma(0.5, 1.5), small(-0.2, 0.2);
  for (Param<T> *p : net->Params()) {
    if (!p->trainable) continue;
    if (EndsWith(p->name, ".gamma"))
      for (T &v : p->value) v = static_cast<T>(gamma(rng));
    else if (EndsWith(p->name, ".beta") || EndsWith(p->name, ".bias"))
      for (T &v : p->value) v = static_cast<T>(small(rng));
  }
}

// ------------------------------------------------------------ construction

TEST_CASE("stem parameter count at full width") {
  XResNetConfig cfg;
  const XResNet<float> net = XResNet<float>::Build(cfg, 1);
  CHECK(net.stem_conv[0].weight.size() == 288);
  CHECK(net.stem_conv[1].weight.size() == 9216);
  CHECK(net.stem_conv[2].weight.size() == 18432);
  CHECK(net.stem_conv[0].out_channels() == 32);
  CHECK(net.stem_conv[1].out_channels() == 32);
  CHECK(net.stem_conv[2].out_channels() == 64);
  CHECK(net.stem_conv[0].stride() == 2);
  CHECK(net.stem_bn[2].gamma.size() == 64);
  CHECK(net.blocks.size() == 8);
  CHECK(net.w0.size() == 64);
}

TEST_CASE("construction is seeded and validated") {
  const XResNetConfig cfg = TinyConfig();
  const XResNet<float> a = XResNet<float>::Build(cfg, 5), b = XResNet<float>::Build(cfg, 5),
                       c = XResNet<float>::Build(cfg, 6);
  CHECK(a.ToFile().Encode() == b.ToFile().Encode());
  CHECK(a.ToFile().Encode() != c.ToFile().Encode());
  CHECK(a.NumTrainable() == c.NumTrainable());

  for (const ResidualBlock<float> &blk : a.blocks) {
    for (float g : blk.bn2.gamma.value) CHECK(g == 0.0f);
    for (float g : blk.bn1.gamma.value) CHECK(g == 1.0f);
  }

  XResNetConfig bad = cfg;
  bad.blocks_per_stage = {2, 2, 2};
  CHECK(testing::CodeOf([&] { XResNet<float>::Build(bad, 1); }) == ErrorCode::kInvalidConfig);
  bad = cfg;
  bad.stage_channels = {64, 128, 128, 512};
  CHECK(testing::CodeOf([&] { XResNet<float>::Build(bad, 1); }) == ErrorCode::kInvalidConfig);
  bad = cfg;
  bad.se_enabled = true;
  bad.se_reduction = 3;
  CHECK(testing::CodeOf([&] { XResNet<float>::Build(bad, 1); }) == ErrorCode::kInvalidConfig);
  bad = cfg;
  bad.m0 = 0.1;
  CHECK(testing::CodeOf([&] { XResNet<float>::Build(bad, 1); }) == ErrorCode::kInvalidMargins);

  XResNetConfig echo = cfg;
  echo.se_enabled = true;
  echo.width_multiplier = 0.3;
  echo.alpha = 12.5;
  CHECK(XResNetConfig::FromEcho(echo.Echo()) == echo);
}

TEST_CASE("time axis shrinks to 16 frames for a 500-frame input") {
  XResNetConfig cfg = TinyConfig();
  XResNet<float> net = XResNet<float>::Build(cfg, 2);
  Tensor4<float> x = RandomTensor<float>(1, 1, 70, 500, 3);
  for (int i = 0; i < 3; i++) x = net.stem_bn[i].Infer(net.stem_conv[i].Infer(x));
  CHECK(x.w == 250);
  x = MaxPool<float>().Infer(x);
  CHECK(x.w == 125);
  for (const auto &blk : net.blocks) x = blk.Infer(x);
  CHECK(x.w == 16);
  CHECK(x.h == 3);
  CHECK(x.c == cfg.Scaled(512));
}

TEST_CASE("forward outputs") {
  const XResNet<float> net = XResNet<float>::Build(TinyConfig(), 4);
  for (int t : {32, 77, 500}) {
    const XResNetOutput<float> out = net.Infer(RandomTensor<float>(3, 1, 70, t, t, -5, 5));
    CHECK(out.n == 3);
    CHECK(out.dim == 64);
    REQUIRE(out.embeddings.size() == 3 * 64);
    for (float v : out.embeddings) CHECK(std::isfinite(v));
    for (float s : out.scores) {
      CHECK(s >= -1.0f);
      CHECK(s <= 1.0f);
    }
  }
  CHECK(testing::CodeOf([&] { net.Infer(RandomTensor<float>(1, 1, 70, 31, 1)); }) ==
        ErrorCode::kInputTooShort);
  CHECK(testing::CodeOf([&] { net.Infer(RandomTensor<float>(1, 1, 20, 64, 1)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("inference is deterministic across calls and threads") {
  const XResNet<float> net = XResNet<float>::Build(TinyConfig(), 8);
  const Tensor4<float> x = RandomTensor<float>(2, 1, 70, 120, 9);
  const XResNetOutput<float> ref = net.Infer(x);
  std::vector<XResNetOutput<float>> outs(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; i++) threads.emplace_back([&, i] { outs[i] = net.Infer(x); });
  for (auto &t : threads) t.join();
  for (const auto &o : outs) {
    CHECK(o.embeddings == ref.embeddings);
    CHECK(o.scores == ref.scores);
  }
}

TEST_CASE("model file round trip") {
  XResNetConfig cfg = TinyConfig();
  cfg.se_enabled = true;
  XResNet<float> net = XResNet<float>::Build(cfg, 10);
  Perturb(&net, 1);
  const std::string bytes = net.ToFile().Encode();
  const XResNet<float> back = XResNet<float>::FromFile(ModelFile::Decode(bytes));
  CHECK(back.config() == cfg);
  CHECK(back.ToFile().Encode() == bytes);
  const Tensor4<float> x = RandomTensor<float>(1, 1, 70, 64, 2);
  CHECK(back.Infer(x).embeddings == net.Infer(x).embeddings);
}

// ------------------------------------------------------------ layer facts

TEST_CASE("fresh stride-1 residual block is an identity on non-negative input") {
  std::mt19937_64 rng(3);
  ResidualBlock<double> blk("b", 4, 4, 1, false, 16);
  blk.Init(&rng);
  CHECK(!blk.has_projection());
  const Tensor4<double> x = RandomTensor<double>(2, 4, 6, 9, 4, 0.0, 2.0);
  CHECK(blk.Infer(x).data == x.data);
  ResidualBlock<double> se_blk("s", 4, 4, 1, true, 2);
  se_blk.Init(&rng);
  CHECK(se_blk.Infer(x).data == x.data);

  ResidualBlock<double> down("d", 4, 8, 2, false, 16);
  down.Init(&rng);
  CHECK(down.has_projection());
  const Tensor4<double> y = down.Infer(x);
  CHECK(y.h == 3);
  CHECK(y.w == 5);
  CHECK(y.c == 8);
}

TEST_CASE("squeeze and excitation") {
  SeBlock<double> se("se", 4, 2);
  const Tensor4<double> x = RandomTensor<double>(2, 4, 3, 5, 6);
  const Tensor4<double> half = se.Infer(x);
  for (size_t i = 0; i < x.size(); i++) CHECK(half.data[i] == 0.5 * x.data[i]);

  std::mt19937_64 rng(2);
  se.InitHeNormal(&rng);
  const std::vector<double> s = se.Scales(x);
  for (double v : s) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  const Tensor4<double> y = se.Infer(x);
  for (int n = 0; n < 2; n++)
    for (int c = 0; c < 4; c++)
      for (int i = 0; i < 15; i++) CHECK(std::abs(y.Plane(n, c)[i]) <= std::abs(x.Plane(n, c)[i]));

  // C = 2, H = W = 1, one hidden unit: gap = x, h = relu(x0 - x1 + 0.5),
  // s_c = sigmoid(w2_c h + b2_c).
  SeBlock<double> hand("h", 2, 2);
  hand.w1.value = {1.0, -1.0};
  hand.b1.value = {0.5};
  hand.w2.value = {2.0, -1.0};
  hand.b2.value = {0.0, 0.25};
  Tensor4<double> in(1, 2, 1, 1);
  in.data = {1.5, 0.25};
  const double h = 1.5 - 0.25 + 0.5;
  const double s0 = 1.0 / (1.0 + std::exp(-2.0 * h)), s1 = 1.0 / (1.0 + std::exp(h - 0.25));
  const Tensor4<double> out = hand.Infer(in);
  CHECK(std::abs(out.data[0] - s0 * 1.5) < 1e-9);
  CHECK(std::abs(out.data[1] - s1 * 0.25) < 1e-9);
  CHECK(testing::CodeOf([] { SeBlock<double>("bad", 6, 4); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("stats pooling is invariant to permuting time") {
  const Tensor4<double> x = RandomTensor<double>(2, 3, 4, 11, 12);
  std::vector<int> perm(11);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  Tensor4<double> p = x;
  for (int n = 0; n < 2; n++)
    for (int c = 0; c < 3; c++)
      for (int f = 0; f < 4; f++)
        for (int t = 0; t < 11; t++) p.at(n, c, f, t) = x.at(n, c, f, perm[t]);
  StatsPooling<double> pool;
  const Tensor4<double> a = pool.Infer(x), b = pool.Infer(p);
  REQUIRE(a.c == 2 * 3 * 4);
  for (size_t i = 0; i < a.size(); i++) CHECK(std::abs(a.data[i] - b.data[i]) < 1e-12);

  // Whole network: the embedding only sees time through the pooling, so a
  // permutation of the pooled map is invisible.  Check the pooled mean.
  double mean = 0.0;
  for (int t = 0; t < 11; t++) mean += x.at(1, 2, 3, t);
  CHECK(a.at(1, 11, 0, 0) == doctest::Approx(mean / 11).epsilon(1e-12));
}

TEST_CASE("disabled SE equals SE with every scale forced to one") {
  XResNetConfig off = TinyConfig(), on = TinyConfig();
  on.se_enabled = true;
  XResNet<double> a = XResNet<double>::Build(off, 3);
  Perturb(&a, 4);
  XResNet<double> b = XResNet<double>::Build(on, 99);
  std::map<std::string, const Param<double> *> by_name;
  for (const Param<double> *p : std::as_const(a).Params()) by_name[p->name] = p;
  for (Param<double> *p : b.Params()) {
    auto it = by_name.find(p->name);
    if (it != by_name.end()) {
      p->value = it->second->value;
    } else if (EndsWith(p->name, ".se.fc2.bias")) {
      std::fill(p->value.begin(), p->value.end(), std::numeric_limits<double>::infinity());
    }
  }
  const Tensor4<double> x = RandomTensor<double>(2, 1, 70, 70, 5);
  const auto ya = a.Infer(x), yb = b.Infer(x);
  CHECK(ya.embeddings == yb.embeddings);
  CHECK(ya.scores == yb.scores);
  const auto fa = a.Forward(x), fb = b.Forward(x);
  CHECK(fa.embeddings == fb.embeddings);
}

// ------------------------------------------------------------ loss

TEST_CASE("oc-softmax worked values") {
  for (const auto &row : testing::OracleRows("oc-softmax.txt")) {
    const int y = static_cast<int>(row[0]);
    const double s = row[1];
    const OcSoftmaxResult r = OcSoftmaxLoss(std::vector<double>{s}, std::vector<int>{y},
                                            {row[2], row[3], row[4]});
    CHECK(std::abs(r.loss - row[5]) <= 1e-9 * std::max(1.0, row[5]));
  }
  const OcSoftmaxResult at_margin =
      OcSoftmaxLoss(std::vector<double>{0.9, 0.2}, std::vector<int>{0, 1}, {20, 0.9, 0.2});
  CHECK(std::abs(at_margin.per_sample[0] - std::log(2.0)) < 1e-9);
  CHECK(std::abs(at_margin.per_sample[1] - std::log(2.0)) < 1e-9);
  const OcSoftmaxResult top =
      OcSoftmaxLoss(std::vector<double>{1.0}, std::vector<int>{0}, {20, 0.9, 0.2});
  CHECK(std::abs(top.loss - 0.126928) < 1e-6);

  CHECK(testing::CodeOf([] {
          OcSoftmaxLoss(std::vector<double>{0.0}, std::vector<int>{0}, {20, 0.2, 0.2});
        }) == ErrorCode::kInvalidMargins);
  CHECK(testing::CodeOf([] {
          OcSoftmaxLoss(std::vector<double>{0.0, 0.1}, std::vector<int>{0}, {});
        }) == ErrorCode::kShapeMismatch);
  CHECK(testing::CodeOf([] {
          OcSoftmaxLoss(std::vector<double>{0.0}, std::vector<int>{2}, {});
        }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("oc-softmax gradient matches central differences") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; trial++) {
    const int n = 1 + static_cast<int>(rng() % 16);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; i++) {
      s[i] = u(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    const OcSoftmaxResult r = OcSoftmaxLoss(s, y);
    for (int i = 0; i < n; i++) {
      // The loss is a sum of per-sample terms; differencing the one term
      // that moves keeps gradients near 1e-11 above the rounding noise of
      // the total.
      const double h = 1e-5, keep = s[i];
      s[i] = keep + h;
      const double up = OcSoftmaxLoss(s, y).per_sample[i] / n;
      s[i] = keep - h;
      const double down = OcSoftmaxLoss(s, y).per_sample[i] / n;
      s[i] = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - r.grad[i]) /
                                  std::max({std::abs(numeric), std::abs(r.grad[i]), 1e-300}));
    }
  }
  CHECK(worst < 1e-5);
}

// ------------------------------------------------------------ gradients

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst_param;
  size_t checked = 0;
};

double BatchLoss(XResNet<double> *net, const Tensor4<double> &x, const std::vector<int> &y) {
  const XResNetOutput<double> out = net->Forward(x);
  return OcSoftmaxLoss(out.scores, y).loss;
}

GradCheck CheckAllGradients(XResNet<double> *net, const Tensor4<double> &x,
                            const std::vector<int> &y) {
  net->ZeroGrad();
  const XResNetOutput<double> out = net->Forward(x);
  net->Backward(OcSoftmaxLoss(out.scores, y).grad);
  GradCheck result;
  const double h = 1e-6;
  for (Param<double> *p : net->Params()) {
    if (!p->trainable) continue;
    const AlignedVector<double> analytic = p->grad;
    for (size_t j = 0; j < p->size(); j++) {
      const double keep = p->value[j];
      p->value[j] = keep + h;
      const double up = BatchLoss(net, x, y);
      p->value[j] = keep - h;
      const double down = BatchLoss(net, x, y);
      p->value[j] = keep;
      const double numeric = (up - down) / (2 * h);
      const double rel = std::abs(numeric - analytic[j]) /
                         std::max({std::abs(numeric), std::abs(analytic[j]), 1e-6});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p->name + "[" + std::to_string(j) + "]";
      }
      result.checked++;
    }
  }
  return result;
}

TEST_CASE("full network gradients match finite differences") {
  for (bool se : {false, true}) {
    XResNetConfig cfg = TinyConfig();
    cfg.se_enabled = se;
    XResNet<double> net = XResNet<double>::Build(cfg, 21);
    Perturb(&net, 22);
    const Tensor4<double> x = RandomTensor<double>(2, 1, 70, 64, 23, -2, 2);
    const GradCheck r = CheckAllGradients(&net, x, {0, 1});
    INFO("se=" << se << " worst " << r.worst_param << " rel " << r.max_rel_error);
    CHECK(r.checked == net.NumTrainable());
    CHECK(r.max_rel_error < 1e-3);
  }
}

TEST_CASE("input gradient matches finite differences") {
  XResNet<double> net = XResNet<double>::Build(TinyConfig(), 31);
  Perturb(&net, 32);
  Tensor4<double> x = RandomTensor<double>(2, 1, 70, 40, 33);
  const std::vector<int> y{1, 0};
  net.ZeroGrad();
  const Tensor4<double> dx = net.Backward(OcSoftmaxLoss(net.Forward(x).scores, y).grad);
  std::mt19937_64 rng(34);
  for (int k = 0; k < 40; k++) {
    const size_t j = rng() % x.size();
    const double keep = x.data[j], h = 1e-6;
    x.data[j] = keep + h;
    const double up = BatchLoss(&net, x, y);
    x.data[j] = keep - h;
    const double down = BatchLoss(&net, x, y);
    x.data[j] = keep;
    const double numeric = (up - down) / (2 * h);
    CHECK(std::abs(numeric - dx.data[j]) <= 1e-3 * std::max({std::abs(numeric), 1e-6}));
  }
}

TEST_CASE("duplicated samples receive identical gradients") {
  XResNet<double> net = XResNet<double>::Build(TinyConfig(), 41);
  Perturb(&net, 42);
  const Tensor4<double> one = RandomTensor<double>(1, 1, 70, 48, 43);
  const Tensor4<double> x = StackBatch<double>({one, one});
  net.ZeroGrad();
  const Tensor4<double> dx = net.Backward(OcSoftmaxLoss(net.Forward(x).scores, std::vector<int>{1, 1}).grad);
  for (size_t i = 0; i < one.size(); i++)
    CHECK(std::abs(dx.Sample(0)[i] - dx.Sample(1)[i]) <= 1e-12 * (1.0 + std::abs(dx.Sample(0)[i])));
}

TEST_CASE("saturated margins give vanishing gradients") {
  XResNet<double> net = XResNet<double>::Build(TinyConfig(), 51);
  Perturb(&net, 52);
  const Tensor4<double> x = RandomTensor<double>(2, 1, 70, 48, 53);
  const XResNetOutput<double> out = net.Forward(x);
  const double lowest = std::min(out.scores[0], out.scores[1]);
  const OcSoftmaxOptions opts{1000.0, lowest - 0.1, -1.0};
  net.ZeroGrad();
  const OcSoftmaxResult loss = OcSoftmaxLoss(out.scores, std::vector<int>{0, 0}, opts);
  CHECK(loss.loss < 1e-30);
  net.Backward(loss.grad);
  double norm = 0.0;
  for (const Param<double> *p : std::as_const(net).Params())
    for (double g : p->grad) norm += g * g;
  CHECK(std::sqrt(norm) < 1e-6);
}

// ------------------------------------------------------------ optimizer

TEST_CASE("adam steps") {
  for (const auto &row : testing::OracleRows("adam.txt")) {
    AdamState<double> adam({row[0], row[1], row[2], row[3], row[4]});
    double p = row[5];
    const double g = row[6];
    adam.Step(std::vector<ParamRef<double>>{{&p, &g, 1}});
    CHECK(std::abs(p - row[7]) < 1e-12);
    CHECK(adam.step() == 1);
  }

  std::vector<double> p{0.5, -2.0, 3.0}, zero(3, 0.0);
  AdamOptions no_decay;
  no_decay.weight_decay = 0.0;
  AdamState<double> plain(no_decay);
  plain.Step(std::vector<ParamRef<double>>{{p.data(), zero.data(), 3}});
  CHECK(p == std::vector<double>{0.5, -2.0, 3.0});

  AdamState<double> decayed;
  decayed.Step(std::vector<ParamRef<double>>{{p.data(), zero.data(), 3}});
  CHECK(p[0] == doctest::Approx(0.5 * (1 - 2e-5)).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(3.0 * (1 - 2e-5)).epsilon(1e-15));
  CHECK(decayed.first_moment()[0].size() == 3);

  std::vector<double> q(2, 1.0), gq(2, 0.0);
  CHECK(testing::CodeOf([&] {
          decayed.Step(std::vector<ParamRef<double>>{{q.data(), gq.data(), 2}});
        }) == ErrorCode::kShapeMismatch);
}

// ------------------------------------------------------------ training

// Utterances whose class is a bright band in the upper or lower half.
std::vector<LabeledFeatures> BandCorpus(int n, int frames, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<LabeledFeatures> out;
  for (int i = 0; i < n; i++) {
    LabeledFeatures u;
    u.label = i % 2;
    u.features.values.resize(frames, kLfbDim);
    for (int t = 0; t < frames; t++)
      for (int d = 0; d < kLfbDim; d++) {
        const bool band = u.label ? (d >= 45 && d < 60) : (d >= 10 && d < 25);
        u.features.values(t, d) = g(rng) + (band ? 3.0 : 0.0);
      }
    out.push_back(std::move(u));
  }
  return out;
}

NnetTrainOptions SmallTraining() {
  NnetTrainOptions o;
  o.max_epochs = 4;
  o.batch_size = 8;
  o.crop_frames = 48;
  o.dev_shift = 16;
  o.seed = 3;
  return o;
}

TEST_CASE("training on a separable corpus") {
  const auto train = BandCorpus(32, 64, 1), dev = BandCorpus(8, 64, 2);
  const NnetTrainResult r = TrainXResNet(TinyConfig(), train, dev, SmallTraining());
  REQUIRE(r.log.size() >= 3);
  CHECK(r.log[1].train_loss < r.log[0].train_loss);
  CHECK(r.log[2].train_loss < r.log[1].train_loss);
  double best = 1.0;
  for (const EpochRecord &e : r.log) best = std::min(best, e.dev_eer);
  CHECK(best < 0.05);
  CHECK(r.log[r.best_epoch - 1].dev_eer == best);
  CHECK(r.log[r.best_epoch - 1].improved);

  const NnetTrainResult again = TrainXResNet(TinyConfig(), train, dev, SmallTraining());
  CHECK(again.LogText() == r.LogText());
  CHECK(again.model.ToFile().Encode() == r.model.ToFile().Encode());
}

TEST_CASE("zero patience stops at the first epoch without improvement") {
  const auto train = BandCorpus(16, 64, 5), dev = BandCorpus(6, 64, 6);
  NnetTrainOptions o = SmallTraining();
  o.patience = 0;
  o.max_epochs = 10;
  const NnetTrainResult r = TrainXResNet(TinyConfig(), train, dev, o);
  for (size_t i = 0; i + 1 < r.log.size(); i++) CHECK(r.log[i].improved);
  if (r.log.size() < 10) CHECK(!r.log.back().improved);

  std::vector<LabeledFeatures> one_class(train.begin(), train.begin() + 1);
  CHECK(testing::CodeOf([&] { TrainXResNet(TinyConfig(), one_class, dev, o); }) ==
        ErrorCode::kInsufficientData);
}

TEST_CASE("sliding-window embeddings") {
  XResNetConfig cfg = TinyConfig();
  const XResNet<float> net = XResNet<float>::Build(cfg, 61);
  auto frames = [](int t) {
    FeatureMatrix f;
    f.values = Matrix::Random(t, kLfbDim);
    return f;
  };
  const EmbeddingWindows w1000 = ExtractEmbeddings(net, frames(1000));
  CHECK(w1000.embeddings.rows() == 51);
  CHECK(w1000.embeddings.cols() == 64);
  CHECK(w1000.starts.back() == 500);
  CHECK(!w1000.padded);
  const EmbeddingWindows w500 = ExtractEmbeddings(net, frames(500));
  CHECK(w500.embeddings.rows() == 1);
  const FeatureMatrix short_f = frames(300);
  const EmbeddingWindows w300 = ExtractEmbeddings(net, short_f);
  CHECK(w300.embeddings.rows() == 1);
  CHECK(w300.padded);
  // The padded window equals an explicit zero-padded input.
  const XResNetOutput<float> direct = net.Infer(FeaturesToTensor<float>(short_f, 0, 500));
  for (int i = 0; i < 64; i++) CHECK(w300.embeddings(0, i) == doctest::Approx(direct.embeddings[i]));
  CHECK(testing::CodeOf([&] { ExtractEmbeddings(net, FeatureMatrix()); }) ==
        ErrorCode::kEmptyFeatures);

  // Window k covers frames [10k, 10k + 500).
  const FeatureMatrix f = frames(620);
  const EmbeddingWindows w = ExtractEmbeddings(net, f);
  const XResNetOutput<float> k3 = net.Infer(FeaturesToTensor<float>(f, 30, 500));
  for (int i = 0; i < 64; i++) CHECK(w.embeddings(3, i) == k3.embeddings[i]);
}

}  // namespace
}  // namespace psdet
