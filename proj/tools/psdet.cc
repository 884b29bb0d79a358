// psdet/tools/psdet.cc

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

// Command-line driver.  Every command is a thin layer over the library:
// it loads inputs, calls one or two library functions and writes results.
//
// Exit status: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "psdet/audio-io.h"
#include "psdet/augment.h"
#include "psdet/backend/gmm.h"
#include "psdet/binary-io.h"
#include "psdet/config.h"
#include "psdet/error.h"
#include "psdet/features.h"
#include "psdet/nnet/trainer.h"
#include "psdet/nnet/xresnet.h"
#include "psdet/pipeline.h"
#include "psdet/sad.h"

namespace fs = std::filesystem;
using namespace psdet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Thrown for missing or contradictory flags that CLI11 cannot check.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int ExitCodeFor(const Error &e) { return IsNumericError(e.code()) ? kExitNumeric : kExitData; }

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> overrides;

  PipelineConfig Load() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig() : PipelineConfig::Load(config_path);
    for (const std::string &kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects section.key=value: " + kv);
      cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    cfg.PropagateSeed();
    cfg.sad_train.mvn_window_s = cfg.sad.mvn_window_s;
    cfg.Validate();
    return cfg;
  }
};

void AddCommon(CLI::App *cmd, CommonFlags *flags) {
  cmd->add_option("--config", flags->config_path, "INI config file");
  cmd->add_option("--seed", flags->seed, "Top-level random seed");
  cmd->add_option("--jobs", flags->jobs, "Parallel file jobs")->check(CLI::PositiveNumber);
  cmd->add_option("--set", flags->overrides, "Config override section.key=value");
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.  Errors are reported
// per item; the worst exit code is returned.
int ParallelFor(size_t n, int jobs, const std::function<void(size_t)> &fn,
                const std::function<std::string(size_t)> &label) {
  std::atomic<size_t> next{0};
  std::mutex mu;
  int status = 0;
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const Error &e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "psdet: " << label(i) << ": " << e.what() << "\n";
        status = std::max(status, ExitCodeFor(e));
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  for (int t = 1; t < count; t++) threads.emplace_back(worker);
  worker();
  for (auto &t : threads) t.join();
  return status;
}

std::string ArchiveName(const std::string &audio_path, const char *ext) {
  std::string name = audio_path;
  for (char &c : name)
    if (c == '/' || c == '\\') c = '_';
  return name + ext;
}

void EnsureDir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
}

void WriteText(const std::string &path, const std::string &text) {
  WriteFileBytes(path, text);
}

std::optional<SadModel> LoadSad(const PipelineConfig &cfg, const std::string &path,
                                const char *command) {
  if (!cfg.sad_enabled) return std::nullopt;
  if (path.empty())
    throw UsageError(std::string(command) +
                     ": --sad <model> is required (or set sad.enabled = false)");
  return SadModel::FromFile(ModelFile::Read(path, ModelKind::kSad));
}

FeatureMatrix UtteranceFeatures(const std::string &manifest, const ManifestEntry &e,
                                const std::optional<SadModel> &sad, const PipelineConfig &cfg) {
  const AudioBuffer audio = ReadWav(ResolveManifestPath(manifest, e.audio_path));
  return FrontEnd(audio, sad ? &*sad : nullptr, cfg.sad);
}

// Features of a manifest subset, computed in parallel, in manifest order.
std::vector<FeatureMatrix> ManifestFeatures(const std::string &manifest,
                                            const std::vector<ManifestEntry> &entries,
                                            const std::optional<SadModel> &sad,
                                            const PipelineConfig &cfg, int jobs) {
  std::vector<FeatureMatrix> out(entries.size());
  const int status = ParallelFor(
      entries.size(), jobs,
      [&](size_t i) { out[i] = UtteranceFeatures(manifest, entries[i], sad, cfg); },
      [&](size_t i) { return entries[i].audio_path; });
  if (status != 0) throw Error(ErrorCode::kInsufficientData, "feature extraction failed");
  return out;
}

// ------------------------------------------------------------- commands

int ExtractFeatures(const CommonFlags &flags, const std::string &manifest_path,
                    const std::string &out_dir, const std::string &kind,
                    const std::string &sad_path) {
  const PipelineConfig cfg = flags.Load();
  if (kind != "lfb" && kind != "mfcc") throw UsageError("--kind must be lfb or mfcc");
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "extract-features");
  const DatasetManifest manifest = LoadManifest(manifest_path);
  EnsureDir(out_dir);
  return ParallelFor(
      manifest.entries.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = manifest.entries[i];
        const AudioBuffer audio = ReadWav(ResolveManifestPath(manifest_path, e.audio_path));
        FeatureMatrix f = kind == "lfb" ? ComputeLfb(audio) : ComputeMfcc(audio);
        if (sad) f = ApplyMask(f, DetectSpeech(*sad, audio, cfg.sad));
        WriteFeatureArchive(f, (fs::path(out_dir) / ArchiveName(e.audio_path, ".psdf")).string());
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
}

int TrainSadCommand(const CommonFlags &flags, const std::string &manifest_path,
                    const std::string &out) {
  const PipelineConfig cfg = flags.Load();
  const DatasetManifest manifest = LoadManifest(manifest_path).Select(Partition::kTrain);
  std::vector<SadTrainingUtterance> data(manifest.entries.size());
  const int status = ParallelFor(
      data.size(), flags.jobs,
      [&](size_t i) {
        const AudioBuffer audio =
            ReadWav(ResolveManifestPath(manifest_path, manifest.entries[i].audio_path));
        data[i].mfcc = ComputeMfcc(audio);
        data[i].labels = EnergyGateLabels(audio);
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
  if (status != 0) return status;
  const SadTrainResult result = TrainSad(data, cfg.sad_train);
  for (size_t e = 0; e < result.epoch_loss.size(); e++)
    std::printf("epoch %zu loss %.9g\n", e + 1, result.epoch_loss[e]);
  result.model.ToFile().Write(out);
  return 0;
}

int RunSadCommand(const CommonFlags &flags, const std::string &model_path,
                  const std::string &manifest_path, const std::string &wav,
                  const std::string &out_dir) {
  const PipelineConfig cfg = flags.Load();
  const SadModel model = SadModel::FromFile(ModelFile::Read(model_path, ModelKind::kSad));
  if (!wav.empty()) {
    std::cout << FormatSegments(DetectSpeech(model, ReadWav(wav), cfg.sad));
    return 0;
  }
  if (manifest_path.empty() || out_dir.empty())
    throw UsageError("run-sad needs --wav, or --manifest with --out-dir");
  const DatasetManifest manifest = LoadManifest(manifest_path);
  EnsureDir(out_dir);
  return ParallelFor(
      manifest.entries.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = manifest.entries[i];
        const AudioBuffer audio = ReadWav(ResolveManifestPath(manifest_path, e.audio_path));
        WriteText((fs::path(out_dir) / ArchiveName(e.audio_path, ".seg")).string(),
                  FormatSegments(DetectSpeech(model, audio, cfg.sad)));
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
}

int AugmentCommand(const CommonFlags &flags, const std::string &manifest_path,
                   const std::string &noise_path, const std::string &out_dir,
                   std::optional<double> snr) {
  PipelineConfig cfg = flags.Load();
  if (snr) cfg.snr_db = *snr;
  const DatasetManifest manifest = LoadManifest(manifest_path);
  const DatasetManifest noise = LoadManifest(noise_path);
  if (noise.entries.empty()) throw Error(ErrorCode::kInsufficientData, "noise manifest is empty");
  EnsureDir((fs::path(out_dir) / "wav").string());
  std::vector<AudioBuffer> noises;
  for (const ManifestEntry &e : noise.entries)
    noises.push_back(ReadWav(ResolveManifestPath(noise_path, e.audio_path)));

  // Per-item seeds are drawn up front so the output does not depend on
  // --jobs.
  std::mt19937_64 rng(cfg.seed);
  std::vector<uint64_t> seeds(manifest.entries.size());
  std::vector<size_t> pick(manifest.entries.size());
  for (size_t i = 0; i < seeds.size(); i++) {
    seeds[i] = rng();
    pick[i] = static_cast<size_t>(rng() % noises.size());
  }
  DatasetManifest out;
  out.entries.resize(manifest.entries.size());
  const int status = ParallelFor(
      manifest.entries.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = manifest.entries[i];
        const AudioBuffer clean = ReadWav(ResolveManifestPath(manifest_path, e.audio_path));
        const std::string rel = "wav/" + ArchiveName(e.audio_path, ".noisy.wav");
        WriteWav(MixAtSnr(clean, noises[pick[i]], cfg.snr_db, seeds[i]),
                 (fs::path(out_dir) / rel).string());
        out.entries[i] = {rel, e.label, e.class_id, e.partition};
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
  if (status != 0) return status;
  WriteManifest(out, (fs::path(out_dir) / "manifest.tsv").string());
  return 0;
}

std::vector<LabeledFeatures> Labeled(const std::vector<ManifestEntry> &entries,
                                     std::vector<FeatureMatrix> features) {
  std::vector<LabeledFeatures> out(entries.size());
  for (size_t i = 0; i < entries.size(); i++) {
    out[i].features = std::move(features[i]);
    out[i].label = entries[i].label == Label::kSpoof ? 1 : 0;
  }
  return out;
}

int TrainModelCommand(const CommonFlags &flags, const std::string &manifest_path,
                      const std::string &dev_manifest_path, const std::string &sad_path,
                      const std::string &out, const std::string &log_path) {
  const PipelineConfig cfg = flags.Load();
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "train-model");
  const DatasetManifest all = LoadManifest(manifest_path);
  const std::string dev_path = dev_manifest_path.empty() ? manifest_path : dev_manifest_path;
  const DatasetManifest train_set = all.Select(Partition::kTrain);
  const DatasetManifest dev_set = LoadManifest(dev_path).Select(Partition::kDev);
  const auto train = Labeled(train_set.entries, ManifestFeatures(manifest_path, train_set.entries,
                                                                 sad, cfg, flags.jobs));
  const auto dev =
      Labeled(dev_set.entries, ManifestFeatures(dev_path, dev_set.entries, sad, cfg, flags.jobs));
  const NnetTrainResult result = TrainXResNet(cfg.model, train, dev, cfg.train);
  const std::string log = "seed " + std::to_string(cfg.seed) + "\n" + result.LogText();
  std::cout << log;
  if (!log_path.empty()) WriteText(log_path, log);
  result.model.ToFile().Write(out);
  return 0;
}

XResNet<float> LoadNet(const std::string &path) {
  return XResNet<float>::FromFile(ModelFile::Read(path, ModelKind::kXResNet));
}

int ExtractEmbeddingsCommand(const CommonFlags &flags, const std::string &model_path,
                             const std::string &manifest_path, const std::string &sad_path,
                             const std::string &out_dir) {
  const PipelineConfig cfg = flags.Load();
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "extract-embeddings");
  const XResNet<float> net = LoadNet(model_path);
  const DatasetManifest manifest = LoadManifest(manifest_path);
  EnsureDir(out_dir);
  return ParallelFor(
      manifest.entries.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = manifest.entries[i];
        const EmbeddingWindows w = ExtractEmbeddings(
            net, UtteranceFeatures(manifest_path, e, sad, cfg), cfg.embed_window,
            cfg.embed_shift);
        FeatureMatrix f;
        f.values = w.embeddings;
        f.kind = FeatureKind::kEmbedding;
        f.frame_shift_s = cfg.embed_shift * kFrameShift;
        WriteFeatureArchive(f, (fs::path(out_dir) / ArchiveName(e.audio_path, ".emb")).string());
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
}

int TrainBackendCommand(const CommonFlags &flags, const std::string &model_path,
                        const std::string &manifest_path, const std::string &sad_path,
                        const std::string &out) {
  const PipelineConfig cfg = flags.Load();
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "train-backend");
  const XResNet<float> net = LoadNet(model_path);
  const DatasetManifest train = LoadManifest(manifest_path).Select(Partition::kTrain);
  std::vector<UtteranceEmbeddings> data(train.entries.size());
  const int status = ParallelFor(
      data.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = train.entries[i];
        data[i].embeddings = ExtractEmbeddings(net, UtteranceFeatures(manifest_path, e, sad, cfg),
                                               cfg.embed_window, cfg.embed_shift)
                                 .embeddings;
        data[i].class_id = e.class_id;
        data[i].label = e.label;
      },
      [&](size_t i) { return train.entries[i].audio_path; });
  if (status != 0) return status;
  const BackendModel backend = TrainBackend(data, cfg.backend);
  for (size_t i = 0; i < backend.plda_log_likelihood.size(); i++)
    std::printf("plda iter %zu loglik %.9g\n", i, backend.plda_log_likelihood[i]);
  backend.ToFile().Write(out);
  return 0;
}

int TrainGmmCommand(const CommonFlags &flags, const std::string &manifest_path,
                    const std::string &sad_path, const std::string &out) {
  const PipelineConfig cfg = flags.Load();
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "train-gmm");
  const DatasetManifest train = LoadManifest(manifest_path).Select(Partition::kTrain);
  const std::vector<FeatureMatrix> feats =
      ManifestFeatures(manifest_path, train.entries, sad, cfg, flags.jobs);
  ModelFile file(ModelKind::kGmm, "gmm_pair\n");
  for (Label label : {Label::kSpoof, Label::kPristine}) {
    Eigen::Index rows = 0;
    for (size_t i = 0; i < feats.size(); i++)
      if (train.entries[i].label == label) rows += feats[i].values.rows();
    Matrix frames(rows, kLfbDim);
    Eigen::Index r = 0;
    for (size_t i = 0; i < feats.size(); i++) {
      if (train.entries[i].label != label) continue;
      frames.middleRows(r, feats[i].values.rows()) = feats[i].values;
      r += feats[i].values.rows();
    }
    const GmmTrainResult g = TrainGmmEm(frames, cfg.gmm);
    std::printf("%s final loglik %.9g\n", LabelName(label), g.log_likelihood.back());
    g.model.AddTo(&file, std::string(LabelName(label)) + ".");
  }
  file.Write(out);
  return 0;
}

int ScoreCommand(const CommonFlags &flags, const std::string &model_path,
                 const std::string &backend_path, const std::string &gmm_path,
                 const std::string &sad_path, const std::string &manifest_path,
                 const std::string &partition, const std::string &out) {
  const PipelineConfig cfg = flags.Load();
  const std::optional<SadModel> sad = LoadSad(cfg, sad_path, "score");
  DatasetManifest manifest = LoadManifest(manifest_path);
  if (partition != "all") {
    if (partition == "train") manifest = manifest.Select(Partition::kTrain);
    else if (partition == "dev") manifest = manifest.Select(Partition::kDev);
    else if (partition == "eval") manifest = manifest.Select(Partition::kEval);
    else throw UsageError("--partition must be train, dev, eval or all");
  }
  const bool use_gmm = !gmm_path.empty();
  if (!use_gmm && (model_path.empty() || backend_path.empty()))
    throw UsageError("score needs --model and --backend, or --gmm");
  PipelineModels models;
  GmmModel spoof_gmm, pristine_gmm;
  if (use_gmm) {
    const ModelFile f = ModelFile::Read(gmm_path, ModelKind::kGmm);
    spoof_gmm = GmmModel::FromFile(f, "spoof.");
    pristine_gmm = GmmModel::FromFile(f, "pristine.");
  } else {
    models.sad = sad;
    models.net = LoadNet(model_path);
    models.backend = BackendModel::FromFile(ModelFile::Read(backend_path, ModelKind::kBackend));
  }
  std::vector<std::string> lines(manifest.entries.size());
  const int status = ParallelFor(
      manifest.entries.size(), flags.jobs,
      [&](size_t i) {
        const ManifestEntry &e = manifest.entries[i];
        const AudioBuffer audio = ReadWav(ResolveManifestPath(manifest_path, e.audio_path));
        const UtteranceScore s = use_gmm
                                     ? ScoreUtteranceGmm(cfg, sad, spoof_gmm, pristine_gmm, audio)
                                     : ScoreUtterance(cfg, models, audio);
        lines[i] = FormatScoreLine(e.audio_path, s);
      },
      [&](size_t i) { return manifest.entries[i].audio_path; });
  std::string dump = "# seed " + std::to_string(cfg.seed) + "\n";
  for (const std::string &l : lines) dump += l;
  WriteText(out, dump);
  return status;
}

int EvalCommand(const CommonFlags &flags, const std::string &scores_path,
                const std::string &manifest_path, const std::string &pooling_name,
                const std::string &partition, const std::string &out) {
  flags.Load();
  const Pooling pooling = ParsePooling(pooling_name);
  DatasetManifest manifest = LoadManifest(manifest_path);
  if (partition == "eval") manifest = manifest.Select(Partition::kEval);
  else if (partition != "all") throw UsageError("--partition must be eval or all");
  std::ifstream is(scores_path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open " + scores_path);
  const EvalReport report = EvaluateDump(ParseScoreDump(is), manifest, pooling);
  const std::string text = FormatEvalReport(report, PoolingName(pooling));
  std::cout << text;
  if (!out.empty()) WriteText(out, text);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"psdet: partial synthetic speech detection toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string manifest, out, out_dir, kind = "lfb", sad, model, wav, noise, dev_manifest,
                                     log_path, backend, gmm, scores, pooling = "avg",
                                     partition = "eval";
  std::optional<double> snr;

  auto *extract = app.add_subcommand("extract-features", "Write one feature archive per file");
  AddCommon(extract, &flags);
  extract->add_option("--manifest", manifest)->required();
  extract->add_option("--out-dir", out_dir)->required();
  extract->add_option("--kind", kind, "lfb or mfcc");
  extract->add_option("--sad", sad, "Mask frames with this SAD model");

  auto *train_sad = app.add_subcommand("train-sad", "Train the speech activity detector");
  AddCommon(train_sad, &flags);
  train_sad->add_option("--manifest", manifest)->required();
  train_sad->add_option("--out", out)->required();

  auto *run_sad = app.add_subcommand("run-sad", "Print or write speech segments");
  AddCommon(run_sad, &flags);
  run_sad->add_option("--model", model)->required();
  run_sad->add_option("--wav", wav);
  run_sad->add_option("--manifest", manifest);
  run_sad->add_option("--out-dir", out_dir);

  auto *augment = app.add_subcommand("augment", "Mix noise into every file at a fixed SNR");
  AddCommon(augment, &flags);
  augment->add_option("--manifest", manifest)->required();
  augment->add_option("--noise", noise, "Noise manifest")->required();
  augment->add_option("--out-dir", out_dir)->required();
  augment->add_option("--snr", snr, "SNR in dB (default augment.snr_db)");

  auto *train_model = app.add_subcommand("train-model", "Train the x-ResNet embedding network");
  AddCommon(train_model, &flags);
  train_model->add_option("--manifest", manifest, "Manifest with train and dev entries")
      ->required();
  train_model->add_option("--dev-manifest", dev_manifest, "Separate dev manifest");
  train_model->add_option("--sad", sad, "SAD model");
  train_model->add_option("--out", out)->required();
  train_model->add_option("--log", log_path, "Training log file");

  auto *extract_emb = app.add_subcommand("extract-embeddings", "Sliding-window embeddings");
  AddCommon(extract_emb, &flags);
  extract_emb->add_option("--model", model)->required();
  extract_emb->add_option("--manifest", manifest)->required();
  extract_emb->add_option("--sad", sad);
  extract_emb->add_option("--out-dir", out_dir)->required();

  auto *train_backend = app.add_subcommand("train-backend", "Train LDA and PLDA");
  AddCommon(train_backend, &flags);
  train_backend->add_option("--model", model)->required();
  train_backend->add_option("--manifest", manifest)->required();
  train_backend->add_option("--sad", sad);
  train_backend->add_option("--out", out)->required();

  auto *train_gmm = app.add_subcommand("train-gmm", "Train the GMM baseline");
  AddCommon(train_gmm, &flags);
  train_gmm->add_option("--manifest", manifest)->required();
  train_gmm->add_option("--sad", sad);
  train_gmm->add_option("--out", out)->required();

  auto *score = app.add_subcommand("score", "Score utterances with both poolings");
  AddCommon(score, &flags);
  score->add_option("--model", model);
  score->add_option("--backend", backend);
  score->add_option("--gmm", gmm, "Score with the GMM baseline instead");
  score->add_option("--sad", sad);
  score->add_option("--manifest", manifest)->required();
  score->add_option("--partition", partition, "train, dev, eval or all");
  score->add_option("--out", out)->required();

  auto *eval = app.add_subcommand("eval", "EER of a score dump");
  AddCommon(eval, &flags);
  eval->add_option("--scores", scores)->required();
  eval->add_option("--manifest", manifest)->required();
  eval->add_option("--pooling", pooling, "avg or interleaved");
  eval->add_option("--partition", partition, "eval or all");
  eval->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*extract) return ExtractFeatures(flags, manifest, out_dir, kind, sad);
    if (*train_sad) return TrainSadCommand(flags, manifest, out);
    if (*run_sad) return RunSadCommand(flags, model, manifest, wav, out_dir);
    if (*augment) return AugmentCommand(flags, manifest, noise, out_dir, snr);
    if (*train_model) return TrainModelCommand(flags, manifest, dev_manifest, sad, out, log_path);
    if (*extract_emb) return ExtractEmbeddingsCommand(flags, model, manifest, sad, out_dir);
    if (*train_backend) return TrainBackendCommand(flags, model, manifest, sad, out);
    if (*train_gmm) return TrainGmmCommand(flags, manifest, sad, out);
    if (*score) return ScoreCommand(flags, model, backend, gmm, sad, manifest, partition, out);
    if (*eval) return EvalCommand(flags, scores, manifest, pooling, partition, out);
  } catch (const UsageError &e) {
    std::cerr << "psdet: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "psdet: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception &e) {
    std::cerr << "psdet: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
