// psdet/src/python/bindings.cc


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

// Python module _psdet: NumPy-facing wrappers over the library.  Matrices
// cross the boundary as C-contiguous float64 arrays (float32 for audio).
// Every psdet::Error surfaces as psdet.PsdetError with the code name as
// its first argument.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "psdet/audio-io.h"
#include "psdet/augment.h"
#include "psdet/backend/gmm.h"
#include "psdet/backend/plda.h"
#include "psdet/binary-io.h"
#include "psdet/error.h"
#include "psdet/features.h"
#include "psdet/nnet/oc-softmax.h"
#include "psdet/pipeline.h"
#include "psdet/scoring.h"

namespace py = pybind11;

namespace psdet {
namespace {

using Samples = py::array_t<float, py::array::c_style | py::array::forcecast>;

AudioBuffer ToAudio(const Samples &samples) {
  if (samples.ndim() != 1) throw Error(ErrorCode::kDimensionMismatch, "audio must be 1-D");
  AudioBuffer a;
  a.samples.assign(samples.data(), samples.data() + samples.size());
  return a;
}

py::array_t<float> FromAudio(const AudioBuffer &a) {
  py::array_t<float> out(static_cast<py::ssize_t>(a.samples.size()));
  std::copy(a.samples.begin(), a.samples.end(), out.mutable_data());
  return out;
}

ScoreSeries ToSeries(const std::vector<double> &values) {
  ScoreSeries s;
  s.values = values;
  return s;
}

py::dict ReportDict(const EvalReport &r) {
  py::dict d;
  d["eer"] = r.eer;
  d["threshold"] = r.threshold;
  d["n_target"] = r.n_target;
  d["n_nontarget"] = r.n_nontarget;
  return d;
}

}  // namespace
}  // namespace psdet

PYBIND11_MODULE(_psdet, m) {
  using namespace psdet;
  m.doc() = "Partial-spoof detection toolkit: features, pooling, EER and PLDA scoring";

  static py::exception<Error> psdet_error(m, "PsdetError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::tuple args = py::make_tuple(ErrorCodeName(e.code()), e.what());
      PyErr_SetObject(psdet_error.ptr(), args.ptr());
    }
  });

  m.attr("SAMPLE_RATE") = kSampleRate;
  m.attr("LFB_DIM") = kLfbDim;
  m.attr("MFCC_DIM") = kMfccDim;

  // ---------------------------------------------------------------- audio
  m.def("read_wav", [](const std::string &path) { return FromAudio(ReadWav(path)); },
        py::arg("path"), "16 kHz mono 16-bit PCM as float32 samples in [-1, 1).");
  m.def("write_wav",
        [](const Samples &samples, const std::string &path) { WriteWav(ToAudio(samples), path); },
        py::arg("samples"), py::arg("path"));

  // ---------------------------------------------------------------- features
  m.def("compute_lfb", [](const Samples &s) { return Matrix(ComputeLfb(ToAudio(s)).values); },
        py::arg("samples"), "70-band linear log filterbank, one row per 10 ms frame.");
  m.def("compute_mfcc", [](const Samples &s) { return Matrix(ComputeMfcc(ToAudio(s)).values); },
        py::arg("samples"));
  m.def(
      "linear_filterbank",
      [](int n_filters, int n_fft) {
        const FilterBank fb = BuildLinearFilterBank(n_filters, n_fft, kSampleRate);
        return py::make_tuple(Matrix(fb.weights), fb.center_freqs);
      },
      py::arg("n_filters") = kLfbDim, py::arg("n_fft") = 512,
      "Returns (weights, centre frequencies in Hz).");
  m.def("read_feature_archive",
        [](const std::string &path) { return Matrix(ReadFeatureArchive(path).values); },
        py::arg("path"));

  // ---------------------------------------------------------------- augment
  m.def(
      "mix_at_snr",
      [](const Samples &clean, const Samples &noise, double snr_db, uint64_t seed) {
        return FromAudio(MixAtSnr(ToAudio(clean), ToAudio(noise), snr_db, seed));
      },
      py::arg("clean"), py::arg("noise"), py::arg("snr_db") = 5.0, py::arg("seed") = 0);

  // ---------------------------------------------------------------- loss
  m.def(
      "oc_softmax_loss",
      [](const std::vector<double> &scores, const std::vector<int> &labels, double alpha,
         double m0, double m1) {
        const OcSoftmaxResult r = OcSoftmaxLoss(scores, labels, {alpha, m0, m1});
        return py::make_tuple(r.loss, r.grad);
      },
      py::arg("scores"), py::arg("labels"), py::arg("alpha") = 20.0, py::arg("m0") = 0.9,
      py::arg("m1") = 0.2, "Returns (mean loss, gradient with respect to each score).");

  // ---------------------------------------------------------------- backend
  m.def(
      "plda_llr",
      [](const Vector &mu, const Matrix &u1, const Matrix &lambda, const Matrix &enroll,
         const Vector &test) {
        PldaModel model;
        model.mu = mu;
        model.u1 = u1;
        model.lambda = lambda;
        return PldaLlr(model, enroll, test);
      },
      py::arg("mu"), py::arg("u1"), py::arg("lambda_"), py::arg("enroll"), py::arg("test"));
  m.def(
      "gmm_frame_llr",
      [](const Vector &w_spoof, const Matrix &mean_spoof, const Matrix &var_spoof,
         const Vector &w_pristine, const Matrix &mean_pristine, const Matrix &var_pristine,
         const Matrix &frames) {
        const GmmModel spoof{w_spoof, mean_spoof, var_spoof};
        const GmmModel pristine{w_pristine, mean_pristine, var_pristine};
        FeatureMatrix f;
        f.values = frames;
        return GmmFrameLlr(spoof, pristine, f).values;
      },
      py::arg("w_spoof"), py::arg("mean_spoof"), py::arg("var_spoof"), py::arg("w_pristine"),
      py::arg("mean_pristine"), py::arg("var_pristine"), py::arg("frames"));

  // ---------------------------------------------------------------- scoring
  m.def("moving_average",
        [](const std::vector<double> &v, int window) { return MovingAverage(v, window); },
        py::arg("values"), py::arg("window") = 10);
  m.def("score_average", [](const std::vector<double> &v) { return ScoreAverage(ToSeries(v)); },
        py::arg("values"));
  m.def(
      "interleaved_aware",
      [](const std::vector<double> &v, int smooth_len, double top_frac, int repeats) {
        return InterleavedAware(ToSeries(v), {smooth_len, top_frac, repeats});
      },
      py::arg("values"), py::arg("smooth_len") = 10, py::arg("top_frac") = 0.05,
      py::arg("repeats") = 1);
  m.def(
      "compute_eer",
      [](const std::vector<double> &targets, const std::vector<double> &nontargets) {
        return ReportDict(ComputeEer(targets, nontargets));
      },
      py::arg("targets"), py::arg("nontargets"),
      "Equal error rate with target = spoof and higher score = more spoof-like.");
  m.def(
      "evaluate_dump",
      [](const std::string &scores, const std::string &manifest, const std::string &pooling) {
        std::ifstream is(scores);
        if (!is) throw Error(ErrorCode::kIoError, "cannot open " + scores);
        return ReportDict(EvaluateDump(ParseScoreDump(is),
                                       LoadManifest(manifest).Select(Partition::kEval),
                                       ParsePooling(pooling)));
      },
      py::arg("scores"), py::arg("manifest"), py::arg("pooling") = "avg");
}
