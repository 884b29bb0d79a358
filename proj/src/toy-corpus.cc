// psdet/toy-corpus.cc

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

#include "psdet/toy-corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <vector>

#include "psdet/error.h"

namespace psdet {

namespace {

constexpr double kFs = kSampleRate;
constexpr double kHarmonicCutoff = 3800.0;

double Uniform(std::mt19937_64 *rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(*rng);
}

// Spectral envelope with two formant bumps.
double FormantGain(double f, double f1, double f2) {
  auto bump = [](double f, double c, double bw) {
    const double d = (f - c) / bw;
    return std::exp(-0.5 * d * d);
  };
  return 0.15 + bump(f, f1, 120.0) + 0.6 * bump(f, f2, 200.0);
}

// Appends one voiced syllable to out, starting at sample `at`.
void Syllable(std::vector<double> *out, size_t at, size_t len, double f0_start, double f0_end,
              bool spoof, int spoof_class, const ToyCorpusOptions &opts,
              std::mt19937_64 *rng) {
  const double f1 = Uniform(rng, 300.0, 900.0), f2 = Uniform(rng, 900.0, 2500.0);
  const double jitter = spoof ? 0.0 : 0.004;
  const int max_h = static_cast<int>(kHarmonicCutoff / std::max(f0_start, f0_end) * 1.2) + 1;
  std::vector<double> amp(max_h + 1, 0.0);

  // Inharmonic partials of the spoof band.
  std::vector<double> band_freq, band_phase;
  if (spoof) {
    const double centre = 4600.0 + 700.0 * spoof_class, width = 700.0;
    for (int k = 0; k < 12; k++) {
      band_freq.push_back(Uniform(rng, centre - width / 2, centre + width / 2));
      band_phase.push_back(Uniform(rng, 0.0, 2.0 * std::numbers::pi));
    }
  }
  const double band_gain = std::pow(10.0, opts.artifact_db / 20.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double phase = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const size_t ramp = std::min<size_t>(len / 2, static_cast<size_t>(0.02 * kFs));
  for (size_t n = 0; n < len && at + n < out->size(); n++) {
    const double frac = static_cast<double>(n) / len;
    const double f0 = (f0_start + (f0_end - f0_start) * frac) * (1.0 + jitter * normal(*rng));
    phase += 2.0 * std::numbers::pi * f0 / kFs;
    double env = 1.0;
    if (n < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * n / ramp);
    if (len - n <= ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * (len - n) / ramp);
    const std::complex<double> z1(std::cos(phase), std::sin(phase));
    std::complex<double> z = z1;
    double v = 0.0;
    for (int h = 1; h <= max_h; h++, z *= z1) {
      const double f = h * f0;
      if (f >= kHarmonicCutoff) break;
      v += FormantGain(f, f1, f2) / h * z.imag();
    }
    if (spoof) {
      double b = 0.0;
      const double t = static_cast<double>(at + n) / kFs;
      for (size_t k = 0; k < band_freq.size(); k++)
        b += std::sin(2.0 * std::numbers::pi * band_freq[k] * t + band_phase[k]);
      v += band_gain * b / std::sqrt(static_cast<double>(band_freq.size()));
    }
    (*out)[at + n] += env * v;
  }
}

// Syllable train covering [begin, end) samples of out.
void SyllableTrain(std::vector<double> *out, size_t begin, size_t end, bool spoof, int cls,
                   const ToyCorpusOptions &opts, std::mt19937_64 *rng) {
  const double base_f0 = 95.0 + 35.0 * cls + Uniform(rng, -10.0, 10.0);
  size_t pos = begin + static_cast<size_t>(Uniform(rng, 0.02, 0.1) * kFs);
  while (pos < end) {
    const size_t len = static_cast<size_t>(Uniform(rng, 0.15, 0.4) * kFs);
    const size_t stop = std::min(end, pos + len);
    const double f0a = base_f0 * Uniform(rng, 0.9, 1.15);
    const double f0b = f0a * Uniform(rng, 0.85, 1.1);
    Syllable(out, pos, stop - pos, f0a, f0b, spoof, cls, opts, rng);
    const double gap = Uniform(rng, 0.0, 1.0) < 0.15 ? Uniform(rng, 0.25, 0.5)
                                                     : Uniform(rng, 0.03, 0.12);
    pos = stop + static_cast<size_t>(gap * kFs);
  }
}

AudioBuffer Finish(std::vector<double> x, std::mt19937_64 *rng) {
  // Broadband floor at a random level, then peak normalization.
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) peak = 1.0;
  const double floor = peak * std::pow(10.0, Uniform(rng, -55.0, -40.0) / 20.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double &v : x) v += floor * normal(*rng);
  peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double gain = Uniform(rng, 0.3, 0.8) / peak;
  AudioBuffer out;
  out.samples.resize(x.size());
  for (size_t i = 0; i < x.size(); i++)
    out.samples[i] = static_cast<float>(std::clamp(x[i] * gain, -1.0, 1.0));
  // Quantize so that in-memory and on-disk versions agree exactly.
  for (float &v : out.samples)
    v = static_cast<float>(std::clamp(std::lround(v * 32768.0), -32768L, 32767L) / 32768.0);
  return out;
}

}  // namespace

AudioBuffer ToyUtterance(Label label, int class_index, double seconds,
                         const ToyCorpusOptions &opts, std::mt19937_64 *rng) {
  std::vector<double> x(static_cast<size_t>(seconds * kFs), 0.0);
  SyllableTrain(&x, 0, x.size(), label == Label::kSpoof, class_index, opts, rng);
  return Finish(std::move(x), rng);
}

AudioBuffer ToyPartialSpoof(int pristine_class, int spoof_class, double seconds,
                            const ToyCorpusOptions &opts, std::mt19937_64 *rng) {
  std::vector<double> x(static_cast<size_t>(seconds * kFs), 0.0);
  const size_t insert = static_cast<size_t>(opts.insert_fraction * x.size());
  const size_t start = std::uniform_int_distribution<size_t>(0, x.size() - insert)(*rng);
  SyllableTrain(&x, 0, start, false, pristine_class, opts, rng);
  SyllableTrain(&x, start, start + insert, true, spoof_class, opts, rng);
  SyllableTrain(&x, start + insert, x.size(), false, pristine_class, opts, rng);
  return Finish(std::move(x), rng);
}

AudioBuffer ToyNoise(double seconds, std::mt19937_64 *rng) {
  std::vector<double> x(static_cast<size_t>(seconds * kFs));
  std::normal_distribution<double> normal(0.0, 1.0);
  // Mildly low-passed white noise.
  double prev = 0.0;
  for (double &v : x) {
    prev = 0.7 * prev + normal(*rng);
    v = prev;
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  AudioBuffer out;
  out.samples.resize(x.size());
  for (size_t i = 0; i < x.size(); i++)
    out.samples[i] = static_cast<float>(
        std::clamp(std::lround(0.5 * x[i] / peak * 32768.0), -32768L, 32767L) / 32768.0);
  return out;
}

ToyCorpusPaths WriteToyCorpus(const std::string &dir, const ToyCorpusOptions &opts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "wav", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  std::mt19937_64 rng(opts.seed);
  DatasetManifest main, partial, noise;

  auto emit = [&](DatasetManifest *m, const AudioBuffer &audio, const std::string &name,
                  Label label, const std::string &cls, Partition part) {
    const std::string rel = "wav/" + name + ".wav";
    WriteWav(audio, (fs::path(dir) / rel).string());
    m->entries.push_back({rel, label, cls, part});
  };

  struct Split {
    Partition part;
    int count;
    double seconds;
  };
  const Split splits[] = {{Partition::kTrain, opts.train_per_class, opts.train_seconds},
                          {Partition::kDev, opts.dev_per_class, opts.train_seconds},
                          {Partition::kEval, opts.eval_per_class, opts.eval_seconds}};
  for (const Split &s : splits) {
    for (int i = 0; i < s.count; i++) {
      for (int c = 0; c < opts.n_pristine_classes; c++) {
        const std::string cls = "pristine" + std::to_string(c);
        const std::string name =
            std::string(PartitionName(s.part)) + "_" + cls + "_" + std::to_string(i);
        const AudioBuffer a = ToyUtterance(Label::kPristine, c, s.seconds, opts, &rng);
        emit(&main, a, name, Label::kPristine, cls, s.part);
        if (s.part == Partition::kEval)
          partial.entries.push_back(main.entries.back());
      }
      for (int c = 0; c < opts.n_spoof_classes; c++) {
        const std::string cls = "spoof" + std::to_string(c);
        const std::string name =
            std::string(PartitionName(s.part)) + "_" + cls + "_" + std::to_string(i);
        emit(&main, ToyUtterance(Label::kSpoof, c, s.seconds, opts, &rng), name, Label::kSpoof,
             cls, s.part);
        if (s.part == Partition::kEval) {
          const int pc = static_cast<int>(rng() % static_cast<uint64_t>(opts.n_pristine_classes));
          emit(&partial, ToyPartialSpoof(pc, c, s.seconds, opts, &rng),
               "partial_" + cls + "_" + std::to_string(i), Label::kSpoof, cls, Partition::kEval);
        }
      }
    }
  }
  for (int i = 0; i < 3; i++)
    emit(&noise, ToyNoise(30.0, &rng), "noise_" + std::to_string(i), Label::kPristine, "noise",
         Partition::kTrain);

  ToyCorpusPaths paths;
  paths.manifest = (fs::path(dir) / "manifest.tsv").string();
  paths.partial_manifest = (fs::path(dir) / "partial.tsv").string();
  paths.noise_manifest = (fs::path(dir) / "noise.tsv").string();
  WriteManifest(main, paths.manifest);
  WriteManifest(partial, paths.partial_manifest);
  WriteManifest(noise, paths.noise_manifest);
  return paths;
}

}  // namespace psdet
