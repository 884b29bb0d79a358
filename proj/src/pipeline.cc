// psdet/pipeline.cc

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

#include "psdet/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "psdet/error.h"
#include "psdet/features.h"
#include "psdet/nnet/trainer.h"

namespace psdet {

FeatureMatrix FrontEnd(const AudioBuffer &audio, const SadModel *sad, const SadOptions &opts) {
  FeatureMatrix lfb = ComputeLfb(audio);
  if (sad == nullptr) return lfb;
  return ApplyMask(lfb, DetectSpeech(*sad, audio, opts));
}

ModelFile BackendModel::ToFile() const {
  ModelFile file(ModelKind::kBackend, "plda_backend\n");
  lda.AddTo(&file, "lda.");
  plda.AddTo(&file, "plda.");
  file.AddScalar("enroll.pristine.count", pristine.count);
  file.AddVector("enroll.pristine.sum", pristine.sum);
  file.AddScalar("enroll.spoof.count", spoof.count);
  file.AddVector("enroll.spoof.sum", spoof.sum);
  return file;
}

BackendModel BackendModel::FromFile(const ModelFile &file) {
  if (file.kind() != ModelKind::kBackend)
    throw Error(ErrorCode::kVersionMismatch, "not a backend model file");
  BackendModel b;
  b.lda = LdaGaussianizer::FromFile(file, "lda.");
  b.plda = PldaModel::FromFile(file, "plda.");
  b.pristine.count = static_cast<int>(file.GetScalar("enroll.pristine.count"));
  b.pristine.sum = file.GetVector("enroll.pristine.sum");
  b.spoof.count = static_cast<int>(file.GetScalar("enroll.spoof.count"));
  b.spoof.sum = file.GetVector("enroll.spoof.sum");
  if (b.plda.Dim() != b.lda.OutputDim() || b.pristine.sum.size() != b.plda.Dim() ||
      b.spoof.sum.size() != b.plda.Dim())
    throw Error(ErrorCode::kCorruptFile, "backend tensors disagree in dimension");
  return b;
}

BackendModel TrainBackend(const std::vector<UtteranceEmbeddings> &data,
                          const BackendTrainOptions &opts) {
  std::map<std::string, std::vector<size_t>> classes;
  for (size_t i = 0; i < data.size(); i++) {
    if (data[i].embeddings.rows() == 0)
      throw Error(ErrorCode::kEmptyFeatures, "utterance without embeddings");
    classes[std::string(LabelName(data[i].label)) + ":" + data[i].class_id].push_back(i);
  }
  bool has_pristine = false, has_spoof = false;
  for (const UtteranceEmbeddings &u : data)
    (u.label == Label::kSpoof ? has_spoof : has_pristine) = true;
  if (!has_pristine || !has_spoof)
    throw Error(ErrorCode::kInsufficientData,
                "backend training needs both pristine and spoof utterances");
  std::mt19937_64 rng(opts.seed);
  std::vector<size_t> train_utts, enroll_utts;
  for (auto &[id, members] : classes) {
    std::shuffle(members.begin(), members.end(), rng);
    const int n = static_cast<int>(members.size());
    const int hold = n == 1 ? 1
                            : std::clamp(static_cast<int>(std::lround(opts.enroll_fraction * n)),
                                         1, n - 1);
    enroll_utts.insert(enroll_utts.end(), members.begin(), members.begin() + hold);
    if (n == 1)
      train_utts.push_back(members[0]);
    else
      train_utts.insert(train_utts.end(), members.begin() + hold, members.end());
  }
  std::sort(train_utts.begin(), train_utts.end());
  std::sort(enroll_utts.begin(), enroll_utts.end());

  Eigen::Index rows = 0;
  for (size_t u : train_utts) rows += data[u].embeddings.rows();
  const Eigen::Index dim = data.empty() ? 0 : data[0].embeddings.cols();
  Matrix x(rows, dim);
  std::vector<std::string> ids;
  Eigen::Index r = 0;
  for (size_t u : train_utts) {
    const std::string id = std::string(LabelName(data[u].label)) + ":" + data[u].class_id;
    x.middleRows(r, data[u].embeddings.rows()) = data[u].embeddings;
    r += data[u].embeddings.rows();
    ids.insert(ids.end(), static_cast<size_t>(data[u].embeddings.rows()), id);
  }

  const int n_classes = static_cast<int>(classes.size());
  BackendModel backend;
  const int lda_dim =
      std::min({opts.lda_dim, n_classes - 1, static_cast<int>(dim)});
  backend.lda = TrainLda(x, ids, std::max(lda_dim, 1));
  const Matrix g = GaussianizeRows(backend.lda, x);
  PldaTrainOptions popts;
  popts.q = std::min(opts.plda_dim, backend.lda.OutputDim());
  popts.n_iters = opts.plda_iters;
  popts.seed = opts.seed;
  PldaTrainResult plda = TrainPldaEm(g, ids, popts);
  backend.plda = plda.model;
  backend.plda_log_likelihood = plda.log_likelihood;

  backend.pristine.sum = Vector::Zero(backend.lda.OutputDim());
  backend.spoof.sum = Vector::Zero(backend.lda.OutputDim());
  for (size_t u : enroll_utts) {
    PldaStats &side = data[u].label == Label::kSpoof ? backend.spoof : backend.pristine;
    const Matrix gu = GaussianizeRows(backend.lda, data[u].embeddings);
    side.count += static_cast<int>(gu.rows());
    side.sum += gu.colwise().sum().transpose();
  }
  if (backend.pristine.count == 0 || backend.spoof.count == 0)
    throw Error(ErrorCode::kInsufficientData,
                "backend training needs both pristine and spoof utterances");
  return backend;
}

ScoreSeries BackendScores(const BackendModel &backend, const Matrix &embeddings) {
  const PldaScorer scorer(backend.plda);
  ScoreSeries out;
  out.origin = "plda";
  out.values.reserve(static_cast<size_t>(embeddings.rows()));
  for (Eigen::Index r = 0; r < embeddings.rows(); r++)
    out.values.push_back(DetectionScore(scorer, backend.pristine, backend.spoof,
                                        Gaussianize(backend.lda, embeddings.row(r).transpose())));
  return out;
}

UtteranceScore PoolSeries(ScoreSeries series, const InterleavedOptions &pooling) {
  UtteranceScore out;
  out.avg = ScoreAverage(series);
  out.interleaved = InterleavedAware(series, pooling);
  out.series = std::move(series);
  return out;
}

UtteranceScore ScoreFeatures(const PipelineConfig &cfg, const XResNet<float> &net,
                             const BackendModel &backend, const FeatureMatrix &lfb) {
  const EmbeddingWindows w = ExtractEmbeddings(net, lfb, cfg.embed_window, cfg.embed_shift);
  ScoreSeries series = BackendScores(backend, w.embeddings);
  series.shift_frames = cfg.embed_shift;
  return PoolSeries(std::move(series), cfg.pooling);
}

UtteranceScore ScoreUtterance(const PipelineConfig &cfg, const PipelineModels &models,
                              const AudioBuffer &audio) {
  const FeatureMatrix lfb =
      FrontEnd(audio, models.sad ? &*models.sad : nullptr, cfg.sad);
  return ScoreFeatures(cfg, models.net, models.backend, lfb);
}

UtteranceScore ScoreUtteranceGmm(const PipelineConfig &cfg, const std::optional<SadModel> &sad,
                                 const GmmModel &spoof, const GmmModel &pristine,
                                 const AudioBuffer &audio) {
  const FeatureMatrix lfb = FrontEnd(audio, sad ? &*sad : nullptr, cfg.sad);
  return PoolSeries(GmmFrameLlr(spoof, pristine, lfb), cfg.pooling);
}

std::string FormatScoreLine(const std::string &path, const UtteranceScore &score) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\n", score.avg, score.interleaved);
  return path + buf;
}

std::vector<ScoreDumpEntry> ParseScoreDump(std::istream &is) {
  std::vector<ScoreDumpEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 tab-separated fields");
    ScoreDumpEntry e;
    e.path = fields[0];
    try {
      e.avg = std::stod(fields[1]);
      e.interleaved = std::stod(fields[2]);
    } catch (const std::logic_error &) {
      throw ParseError(line_no, "unparsable score");
    }
    out.push_back(e);
  }
  return out;
}

Pooling ParsePooling(const std::string &name) {
  if (name == "avg") return Pooling::kAverage;
  if (name == "interleaved") return Pooling::kInterleaved;
  throw Error(ErrorCode::kInvalidConfig, "pooling must be avg or interleaved, got " + name);
}

const char *PoolingName(Pooling pooling) {
  return pooling == Pooling::kAverage ? "avg" : "interleaved";
}

EvalReport EvaluateDump(const std::vector<ScoreDumpEntry> &dump,
                        const DatasetManifest &manifest, Pooling pooling) {
  std::map<std::string, const ScoreDumpEntry *> by_path;
  for (const ScoreDumpEntry &e : dump) by_path[e.path] = &e;
  std::vector<double> target, nontarget;
  for (const ManifestEntry &m : manifest.entries) {
    auto it = by_path.find(m.audio_path);
    if (it == by_path.end())
      throw Error(ErrorCode::kMissingScores, "no score for " + m.audio_path);
    const double s = pooling == Pooling::kAverage ? it->second->avg : it->second->interleaved;
    (m.label == Label::kSpoof ? target : nontarget).push_back(s);
  }
  return ComputeEer(target, nontarget);
}

}  // namespace psdet
