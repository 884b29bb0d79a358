// psdet/tests/sad-test.cc

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

#include <cmath>
#include <random>

#include "doctest.h"
#include "psdet/error.h"
#include "psdet/features.h"
#include "psdet/sad.h"
#include "test-util.h"

namespace psdet {
namespace {

ScoreSeries Series(std::vector<double> v) {
  ScoreSeries s;
  s.values = std::move(v);
  s.shift_frames = 1;
  return s;
}

FeatureMatrix Ramp(int frames, int dim) {
  FeatureMatrix f;
  f.values.resize(frames, dim);
  for (int t = 0; t < frames; t++)
    for (int d = 0; d < dim; d++) f.values(t, d) = 100.0 * t + d;
  return f;
}

TEST_CASE("context stacking") {
  FeatureMatrix one = Ramp(1, kMfccDim);
  const Matrix s1 = StackContext(one);
  REQUIRE(s1.rows() == 1);
  CHECK(s1.cols() == 620);
  for (int c = 0; c < 31; c++) CHECK(s1.block(0, c * 20, 1, 20) == one.values.row(0));

  const FeatureMatrix f = Ramp(50, kMfccDim);
  const Matrix s = StackContext(f);
  CHECK(s.cols() == 620);
  CHECK(s.block(20, 300, 1, 20) == f.values.row(20));
  CHECK(s.block(20, 0, 1, 20) == f.values.row(5));
  CHECK(s.block(20, 600, 1, 20) == f.values.row(35));
  // Edges replicate the first and last frames.
  CHECK(s.block(0, 0, 1, 20) == f.values.row(0));
  CHECK(s.block(49, 600, 1, 20) == f.values.row(49));
}

TEST_CASE("sad forward pass") {
  const SadModel zero = SadModel::Zeros();
  CHECK(zero.w1.rows() == 500);
  CHECK(zero.w2.rows() == 100);
  CHECK(zero.w3.rows() == 2);
  Matrix x = Matrix::Random(4, 620);
  for (double p : SadForward(zero, x).values) CHECK(p == 0.5);

  const SadModel init = SadModel::Init(3);
  const Matrix post = SadPosteriors(init, x);
  for (Eigen::Index t = 0; t < post.rows(); t++) {
    CHECK(post(t, 0) + post(t, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(post(t, 1) >= 0.0);
    CHECK(post(t, 1) <= 1.0);
  }
  CHECK(testing::CodeOf([&] { SadForward(init, Matrix::Zero(1, 619)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("sad forward matches a hand-computed pass") {
  // Only input 0 feeds hidden unit 0, which feeds second-layer unit 0,
  // which drives the speech logit with weight 2 and bias -1.
  SadModel m = SadModel::Zeros();
  m.w1(0, 0) = 1.0;
  m.b1(0) = -0.5;
  m.w2(0, 0) = 3.0;
  m.w3(1, 0) = 2.0;
  m.b3(1) = -1.0;
  Matrix x = Matrix::Zero(2, 620);
  x(0, 0) = 2.0;   // h1 = 1.5, h2 = 4.5, logit = 8
  x(1, 0) = 0.25;  // h1 = relu(-0.25) = 0, logit = -1
  const std::vector<double> p = SadForward(m, x).values;
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-8.0))).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("score smoothing") {
  const ScoreSeries c = SmoothScores(Series(std::vector<double>(30, 0.7)), 50);
  for (double v : c.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

  std::vector<double> spike(21, 0.0);
  spike[10] = 1.0;
  const std::vector<double> s = SmoothScores(Series(spike), 5).values;
  for (int t = 0; t < 21; t++)
    CHECK(s[t] == doctest::Approx(std::abs(t - 10) <= 2 ? 0.2 : 0.0));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<double> a(64), b(64), mix(64);
  for (int i = 0; i < 64; i++) {
    a[i] = g(rng);
    b[i] = g(rng);
    mix[i] = 2.5 * a[i] - 0.75 * b[i];
  }
  const auto sa = SmoothScores(Series(a), 50).values, sb = SmoothScores(Series(b), 50).values,
             sm = SmoothScores(Series(mix), 50).values;
  const double lo = *std::min_element(a.begin(), a.end()),
               hi = *std::max_element(a.begin(), a.end());
  for (int i = 0; i < 64; i++) {
    CHECK(std::abs(sm[i] - (2.5 * sa[i] - 0.75 * sb[i])) < 1e-9);
    CHECK(sa[i] >= lo);
    CHECK(sa[i] <= hi);
  }
}

TEST_CASE("scores to padded segments") {
  const SegmentList all = ScoresToSegments(Series(std::vector<double>(120, 0.9)), 0.5, 1.0 / 3);
  REQUIRE(all.size() == 1);
  CHECK(all[0] == Segment{0.0, 1.2});

  CHECK(ScoresToSegments(Series(std::vector<double>(50, 0.2)), 0.5, 1.0 / 3).empty());

  std::vector<double> two(100, 0.0);
  for (int t = 10; t < 20; t++) two[t] = 1.0;
  for (int t = 30; t < 40; t++) two[t] = 1.0;
  const SegmentList merged = ScoresToSegments(Series(two), 0.5, 1.0 / 3);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].start_s == 0.0);
  CHECK(merged[0].end_s == doctest::Approx(0.4 + 1.0 / 3).epsilon(1e-12));

  // Far-apart runs stay separate, and every run lies inside its padding.
  std::vector<double> far(500, 0.0);
  for (int t = 100; t < 110; t++) far[t] = 1.0;
  for (int t = 300; t < 320; t++) far[t] = 1.0;
  const SegmentList sep = ScoresToSegments(Series(far), 0.5, 0.1);
  REQUIRE(sep.size() == 2);
  CHECK(sep[0].start_s == doctest::Approx(0.9));
  CHECK(sep[0].end_s == doctest::Approx(1.2));
  CHECK(sep[1].start_s <= 3.0);
  CHECK(sep[1].end_s >= 3.2);
  CHECK(FormatSegments(sep) == "0.900000\t1.200000\n2.900000\t3.300000\n");
}

TEST_CASE("masking selects frames by timestamp") {
  const FeatureMatrix f = Ramp(100, 3);
  const FeatureMatrix all = ApplyMask(f, {{0.0, 1.0}});
  CHECK(all.values == f.values);

  const FeatureMatrix part = ApplyMask(f, {{0.10, 0.20}});
  REQUIRE(part.NumFrames() == 10);
  for (int i = 0; i < 10; i++) CHECK(part.values.row(i) == f.values.row(10 + i));

  const FeatureMatrix two = ApplyMask(f, {{0.05, 0.08}, {0.5, 0.52}});
  REQUIRE(two.NumFrames() == 5);
  CHECK(two.values.row(0) == f.values.row(5));
  CHECK(two.values.row(3) == f.values.row(50));

  CHECK(testing::CodeOf([&] { ApplyMask(f, {}); }) == ErrorCode::kEmptyResult);
}

// Voiced bursts separated by digital silence, labelled by the energy gate.
SadTrainingUtterance Bursts(uint64_t seed, AudioBuffer *audio_out = nullptr) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AudioBuffer a;
  for (int seg = 0; seg < 6; seg++) {
    const double hz = 150.0 + 600.0 * u(rng);
    const int speech = static_cast<int>((0.2 + 0.3 * u(rng)) * kSampleRate);
    const int gap = static_cast<int>((0.2 + 0.3 * u(rng)) * kSampleRate);
    // Gliding pitch and 4 Hz syllabic envelope: a stationary tone would
    // normalize to the same all-zero MFCC as silence.
    double phase = 0.0;
    for (int i = 0; i < speech; i++) {
      const double t = static_cast<double>(i) / kSampleRate;
      phase += 2 * M_PI * hz * (1.0 + 0.3 * t) / kSampleRate;
      double v = 0.0;
      for (int h = 1; h <= 5; h++) v += std::sin(h * phase) / h;
      a.samples.push_back(static_cast<float>(0.2 * (0.8 + 0.2 * std::sin(2 * M_PI * 4.0 * t)) * v));
    }
    a.samples.insert(a.samples.end(), gap, 0.0f);
  }
  SadTrainingUtterance utt;
  utt.mfcc = ComputeMfcc(a);
  utt.labels = EnergyGateLabels(a);
  if (audio_out) *audio_out = a;
  return utt;
}

TEST_CASE("sad training separates tones from silence") {
  std::vector<SadTrainingUtterance> train, held_out;
  for (int i = 0; i < 32; i++) train.push_back(Bursts(100 + i));
  for (int i = 0; i < 6; i++) held_out.push_back(Bursts(900 + i));

  SadTrainOptions opts;
  opts.seed = 4;
  const SadTrainResult r = TrainSad(train, opts);
  REQUIRE(r.epoch_loss.size() == 5);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  CHECK(SadFrameAccuracy(r.model, held_out) > 0.99);

  const SadTrainResult again = TrainSad(train, opts);
  CHECK(again.model == r.model);
  CHECK(again.model.ToFile().Encode() == r.model.ToFile().Encode());

  opts.epochs = 0;
  CHECK(TrainSad(train, opts).model == SadModel::Init(4));

  std::vector<SadTrainingUtterance> silent(1);
  silent[0].mfcc = ComputeMfcc(AudioBuffer{std::vector<float>(8000, 0.0f)});
  silent[0].labels.assign(silent[0].mfcc.NumFrames(), 0);
  CHECK(testing::CodeOf([&] { TrainSad(silent, SadTrainOptions()); }) ==
        ErrorCode::kInsufficientData);

  // End to end: detected speech keeps the bursts and drops most silence.
  AudioBuffer audio;
  const SadTrainingUtterance utt = Bursts(1234, &audio);
  const SegmentList segs = DetectSpeech(r.model, audio);
  REQUIRE(!segs.empty());
  int covered = 0, speech = 0;
  for (size_t t = 0; t < utt.labels.size(); t++) {
    if (!utt.labels[t]) continue;
    speech++;
    for (const Segment &s : segs)
      if (s.start_s <= t * 0.01 && t * 0.01 < s.end_s) {
        covered++;
        break;
      }
  }
  CHECK(covered == speech);
}

TEST_CASE("sad model file round trip") {
  const SadModel m = SadModel::Init(17);
  CHECK(SadModel::FromFile(ModelFile::Decode(m.ToFile().Encode())).ToFile().Encode() ==
        m.ToFile().Encode());
  CHECK(SadModel::Init(17) == m);
  CHECK(!(SadModel::Init(18) == m));
}

}  // namespace
}  // namespace psdet
