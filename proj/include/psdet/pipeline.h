// psdet/pipeline.h

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

// Composition of the modules into the scoring pipeline:
//
//   audio -> LFB -> SAD mask -> sliding x-ResNet embeddings -> LDA,
//   whitening, length norm -> PLDA detection score per window -> pooling

#ifndef PSDET_PIPELINE_H_
#define PSDET_PIPELINE_H_

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "psdet/audio-io.h"
#include "psdet/backend/gmm.h"
#include "psdet/backend/lda.h"
#include "psdet/backend/plda.h"
#include "psdet/config.h"
#include "psdet/nnet/xresnet.h"
#include "psdet/sad.h"
#include "psdet/scoring.h"

namespace psdet {

// LFB features restricted to detected speech.  With sad == nullptr the full
// matrix is returned.
FeatureMatrix FrontEnd(const AudioBuffer &audio, const SadModel *sad, const SadOptions &opts);

// Window embeddings of one training utterance.
struct UtteranceEmbeddings {
  Matrix embeddings;
  std::string class_id;
  Label label = Label::kPristine;
};

struct BackendModel {
  LdaGaussianizer lda;
  PldaModel plda;
  PldaStats pristine;  // enrollment statistics, gaussianized space
  PldaStats spoof;
  std::vector<double> plda_log_likelihood;

  ModelFile ToFile() const;
  static BackendModel FromFile(const ModelFile &file);
};

// Holds out a seeded enroll_fraction of each class's utterances (at least
// one, never all unless the class has a single utterance) for the
// enrollment statistics and trains LDA and PLDA on the rest.  The LDA
// dimension is capped at n_classes - 1 and the PLDA rank at the LDA
// dimension.  Throws InsufficientData without both labels.
BackendModel TrainBackend(const std::vector<UtteranceEmbeddings> &data,
                          const BackendTrainOptions &opts);

// Detection score of every embedding row.
ScoreSeries BackendScores(const BackendModel &backend, const Matrix &embeddings);

struct UtteranceScore {
  double avg = 0.0;
  double interleaved = 0.0;
  ScoreSeries series;
};

UtteranceScore PoolSeries(ScoreSeries series, const InterleavedOptions &pooling);

struct PipelineModels {
  std::optional<SadModel> sad;
  XResNet<float> net;
  BackendModel backend;
};

// Scores already extracted (and masked) LFB features.
UtteranceScore ScoreFeatures(const PipelineConfig &cfg, const XResNet<float> &net,
                             const BackendModel &backend, const FeatureMatrix &lfb);

UtteranceScore ScoreUtterance(const PipelineConfig &cfg, const PipelineModels &models,
                              const AudioBuffer &audio);

// The GMM baseline on one utterance: per-frame LLR series, same pooling.
UtteranceScore ScoreUtteranceGmm(const PipelineConfig &cfg, const std::optional<SadModel> &sad,
                                 const GmmModel &spoof, const GmmModel &pristine,
                                 const AudioBuffer &audio);

// Score dump: <utt_path>\t<avg>\t<interleaved>, doubles printed with %.17g.
struct ScoreDumpEntry {
  std::string path;
  double avg = 0.0;
  double interleaved = 0.0;
};
std::string FormatScoreLine(const std::string &path, const UtteranceScore &score);
std::vector<ScoreDumpEntry> ParseScoreDump(std::istream &is);

enum class Pooling { kAverage, kInterleaved };
Pooling ParsePooling(const std::string &name);
const char *PoolingName(Pooling pooling);

// EER over the manifest entries, spoof = target.  Throws MissingScores when
// an entry has no line in the dump.
EvalReport EvaluateDump(const std::vector<ScoreDumpEntry> &dump,
                        const DatasetManifest &manifest, Pooling pooling);

}  // namespace psdet

#endif  // PSDET_PIPELINE_H_
