// psdet/tests/acceptance/acceptance.cc


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

// Acceptance run: one PASS/FAIL line per criterion.  Criteria 1-8 call the
// library directly; 9 and 10 drive the command-line tools on a synthetic
// corpus.  Exit status is the number of failed criteria.

#include <sys/resource.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psdet/augment.h"
#include "psdet/backend/gmm.h"
#include "psdet/backend/plda.h"
#include "psdet/features.h"
#include "psdet/nnet/oc-softmax.h"
#include "psdet/nnet/xresnet.h"
#include "psdet/pipeline.h"
#include "psdet/scoring.h"
#include "test-util.h"

namespace psdet {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

double CpuSeconds(int who) {
  rusage u{};
  ::getrusage(who, &u);
  return u.ru_utime.tv_sec + u.ru_stime.tv_sec + 1e-6 * (u.ru_utime.tv_usec + u.ru_stime.tv_usec);
}

// ------------------------------------------------------------ 1

Outcome GradientCorrectness() {
  const double start = CpuSeconds(RUSAGE_SELF);
  XResNetConfig cfg;
  cfg.blocks_per_stage = {1, 1, 1, 1};
  cfg.width_multiplier = 1.0 / 32;
  cfg.se_enabled = true;
  cfg.se_reduction = 2;
  XResNet<double> net = XResNet<double>::Build(cfg, 21);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> gamma(0.5, 1.5), small(-0.2, 0.2), in(-2.0, 2.0);
  for (Param<double> *p : net.Params()) {
    if (!p->trainable) continue;
    const std::string &n = p->name;
    const bool is_gamma = n.size() > 6 && n.compare(n.size() - 6, 6, ".gamma") == 0;
    const bool is_shift = (n.size() > 5 && n.compare(n.size() - 5, 5, ".beta") == 0) ||
                          (n.size() > 5 && n.compare(n.size() - 5, 5, ".bias") == 0);
    if (is_gamma) for (double &v : p->value) v = gamma(rng);
    if (is_shift) for (double &v : p->value) v = small(rng);
  }
  Tensor4<double> x(2, 1, kLfbDim, 64);
  for (double &v : x.data) v = in(rng);
  const std::vector<int> y{0, 1};
  auto loss = [&] { return OcSoftmaxLoss(net.Forward(x).scores, y).loss; };

  net.ZeroGrad();
  net.Backward(OcSoftmaxLoss(net.Forward(x).scores, y).grad);
  double net_worst = 0.0;
  for (Param<double> *p : net.Params()) {
    if (!p->trainable) continue;
    const AlignedVector<double> analytic = p->grad;
    for (size_t j = 0; j < p->size(); j++) {
      const double keep = p->value[j], h = 1e-6;
      p->value[j] = keep + h;
      const double up = loss();
      p->value[j] = keep - h;
      const double down = loss();
      p->value[j] = keep;
      const double numeric = (up - down) / (2 * h);
      net_worst = std::max(net_worst, std::abs(numeric - analytic[j]) /
                                          std::max({std::abs(numeric), std::abs(analytic[j]), 1e-6}));
    }
  }

  // The loss is a sum of per-sample terms; difference the one that moves.
  double oc_worst = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; trial++) {
    const int n = 1 + static_cast<int>(rng() % 16);
    std::vector<double> s(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; i++) s[i] = u(rng), labels[i] = static_cast<int>(rng() % 2);
    const OcSoftmaxResult r = OcSoftmaxLoss(s, labels);
    for (int i = 0; i < n; i++) {
      const double keep = s[i], h = 1e-5;
      s[i] = keep + h;
      const double up = OcSoftmaxLoss(s, labels).per_sample[i] / n;
      s[i] = keep - h;
      const double down = OcSoftmaxLoss(s, labels).per_sample[i] / n;
      s[i] = keep;
      const double numeric = (up - down) / (2 * h);
      oc_worst = std::max(oc_worst, std::abs(numeric - r.grad[i]) /
                                        std::max({std::abs(numeric), std::abs(r.grad[i]), 1e-300}));
    }
  }
  const double seconds = CpuSeconds(RUSAGE_SELF) - start;
  return {net_worst < 1e-3 && oc_worst < 1e-5 && seconds < 120.0,
          "network max rel " + Fmt("%.2e", net_worst) + ", oc-softmax max rel " +
              Fmt("%.2e", oc_worst) + ", " + Fmt("%.1f", seconds) + " s"};
}

// ------------------------------------------------------------ 2

Outcome OcSoftmaxValues() {
  const OcSoftmaxOptions opts{20.0, 0.9, 0.2};
  const OcSoftmaxResult at_margin =
      OcSoftmaxLoss(std::vector<double>{0.9, 0.2}, std::vector<int>{0, 1}, opts);
  const double e0 = std::abs(at_margin.per_sample[0] - std::log(2.0));
  const double e1 = std::abs(at_margin.per_sample[1] - std::log(2.0));
  const double top =
      OcSoftmaxLoss(std::vector<double>{1.0}, std::vector<int>{0}, opts).loss;
  return {e0 <= 1e-9 && e1 <= 1e-9 && std::abs(top - 0.126928) <= 1e-6,
          "log 2 errors " + Fmt("%.1e", e0) + " / " + Fmt("%.1e", e1) + ", y=0 s=1 loss " +
              Fmt("%.9f", top)};
}

// ------------------------------------------------------------ 3

Outcome FilterbankGeometry() {
  const FilterBank fb = BuildLinearFilterBank(kLfbDim, 512, kSampleRate);
  double centre_err = 0.0;
  for (int i = 0; i < kLfbDim; i++)
    centre_err = std::max(centre_err, std::abs(fb.center_freqs[i] - 8000.0 * (i + 1) / 71.0));
  const FeatureMatrix flat = ApplyFilterBankLog(Matrix::Ones(1, 257), fb);
  const double spread = flat.values.maxCoeff() - flat.values.minCoeff();
  return {fb.NumFilters() == kLfbDim && centre_err < 1e-9 && spread < 1e-6,
          "max centre error " + Fmt("%.1e", centre_err) + " Hz, flat-spectrum spread " +
              Fmt("%.1e", spread)};
}

// ------------------------------------------------------------ 4

Outcome SnrMixing() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> amp(0.01, 0.9), len(0.2, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; trial++) {
    const double seconds = len(rng);
    const AudioBuffer clean = testing::WhiteNoise(seconds, amp(rng), rng());
    const AudioBuffer noise = testing::WhiteNoise(seconds + len(rng), amp(rng), rng());
    const MixComponents m = MixComponentsAtSnr(clean, noise, 5.0, rng());
    worst = std::max(worst, std::abs(20.0 * std::log10(Rms(m.clean) / Rms(m.noise)) - 5.0));
  }
  return {worst <= 0.01, "100 pairs, max |SNR - 5 dB| " + Fmt("%.2e", worst)};
}

// ------------------------------------------------------------ 5

Outcome EmMonotonicity() {
  double worst_plda = 0.0, worst_gmm = 0.0;  // largest decrease
  for (uint64_t seed = 0; seed < 10; seed++) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int dim = 6, q = 3, classes = 30, per = 5;
    Matrix u(dim, q);
    for (Eigen::Index i = 0; i < u.size(); i++) u.data()[i] = normal(rng);
    Matrix x(classes * per, dim);
    std::vector<std::string> ids;
    for (int c = 0; c < classes; c++) {
      Vector z(q);
      for (int k = 0; k < q; k++) z(k) = normal(rng);
      const Vector centre = u * z;
      for (int j = 0; j < per; j++) {
        for (int d = 0; d < dim; d++) x(c * per + j, d) = centre(d) + 0.5 * normal(rng);
        ids.push_back(std::to_string(c));
      }
    }
    PldaTrainOptions popts;
    popts.q = q;
    popts.n_iters = 20;
    popts.seed = seed;
    const auto pll = TrainPldaEm(x, ids, popts).log_likelihood;
    for (size_t i = 1; i < pll.size(); i++) worst_plda = std::max(worst_plda, pll[i - 1] - pll[i]);

    Matrix frames(400, 3);
    for (int i = 0; i < 400; i++)
      for (int d = 0; d < 3; d++) frames(i, d) = 3.0 * (i % 3) * (d == i % 3) + normal(rng);
    GmmTrainOptions gopts;
    gopts.n_components = 4;
    gopts.n_iters = 20;
    gopts.seed = seed;
    const auto gll = TrainGmmEm(frames, gopts).log_likelihood;
    for (size_t i = 1; i < gll.size(); i++) worst_gmm = std::max(worst_gmm, gll[i - 1] - gll[i]);
  }
  return {worst_plda <= 1e-8 && worst_gmm <= 1e-8,
          "10 seeds x 20 iterations, largest decrease plda " + Fmt("%.1e", worst_plda) +
              ", gmm " + Fmt("%.1e", worst_gmm)};
}

// ------------------------------------------------------------ 6

Outcome PldaOracle() {
  const auto rows = testing::OracleRows("plda-1d.txt");
  double worst = 0.0;
  for (const auto &row : rows) {
    PldaModel m;
    m.mu = Vector::Constant(1, row[0]);
    m.u1 = Matrix::Constant(1, 1, row[1]);
    m.lambda = Matrix::Constant(1, 1, row[2]);
    const int n = static_cast<int>(row[3]);
    Matrix enroll(n, 1);
    for (int j = 0; j < n; j++) enroll(j, 0) = row[4 + j];
    worst = std::max(worst, std::abs(PldaLlr(m, enroll, Vector::Constant(1, row[4 + n])) -
                                     row[5 + n]));
  }
  return {rows.size() == 1000 && worst < 1e-8,
          std::to_string(rows.size()) + " trials, max abs error " + Fmt("%.1e", worst)};
}

// ------------------------------------------------------------ 7

// Every distinct score as an "accept if >=" threshold, then the lowest
// crossing of miss == false alarm over all chords, as exact fractions.
double BruteForceEer(const std::vector<double> &tgt, const std::vector<double> &non) {
  std::vector<double> th = tgt;
  th.insert(th.end(), non.begin(), non.end());
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  th.push_back(th.back() + 1.0);
  const int64_t nt = tgt.size(), nn = non.size();
  std::vector<std::pair<int64_t, int64_t>> pts;
  for (double t : th) {
    int64_t miss = 0, fa = 0;
    for (double s : tgt) miss += s < t;
    for (double s : non) fa += s >= t;
    pts.emplace_back(miss * nn, fa * nt);
  }
  __int128 bn = 1, bd = 2;
  auto offer = [&](__int128 n, __int128 d) {
    if (n * bd < bn * d) bn = n, bd = d;
  };
  for (const auto &a : pts)
    for (const auto &b : pts) {
      const int64_t da = a.first - a.second, db = b.first - b.second;
      if (da <= 0 && 0 <= db && da != db)
        offer(static_cast<__int128>(a.first) * (db - da) -
                  static_cast<__int128>(da) * (b.first - a.first),
              static_cast<__int128>(db - da) * nt * nn);
      else if (da == 0)
        offer(a.first, static_cast<__int128>(nt) * nn);
    }
  return static_cast<double>(bn) / static_cast<double>(bd);
}

Outcome EerOracle() {
  std::mt19937_64 rng(11);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; trial++) {
    const int nt = 1 + static_cast<int>(rng() % 10), nn = 1 + static_cast<int>(rng() % 10);
    std::vector<double> tgt(nt), non(nn);
    for (double &s : tgt) s = static_cast<int>(rng() % 21) / 10.0 - 0.5;
    for (double &s : non) s = static_cast<int>(rng() % 21) / 10.0 - 1.0;
    if (ComputeEer(tgt, non).eer != BruteForceEer(tgt, non)) mismatches++;
  }
  const double perfect =
      ComputeEer(std::vector<double>(5, 1.0), std::vector<double>(5, -1.0)).eer;
  const std::vector<double> same{0.3, -0.2, 0.3, 1.1};
  const double chance = ComputeEer(same, same).eer;
  return {mismatches == 0 && perfect == 0.0 && chance == 0.5,
          "1000 random sets, " + std::to_string(mismatches) + " mismatches; perfect " +
              Fmt("%g", perfect) + ", identical " + Fmt("%g", chance)};
}

// ------------------------------------------------------------ 8

Outcome BurstExample() {
  ScoreSeries s;
  s.values.assign(100, 0.0);
  std::fill(s.values.begin(), s.values.begin() + 10, 10.0);
  const double avg = ScoreAverage(s), ia = InterleavedAware(s);
  return {avg == 1.0 && ia == 10.0,
          "score average " + Fmt("%.17g", avg) + ", interleaved-aware " + Fmt("%.17g", ia)};
}

// ------------------------------------------------------------ 9, 10

int Shell(const std::string &cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

EvalReport Evaluate(const std::string &scores, const std::string &manifest, Pooling pooling) {
  std::ifstream is(scores);
  return EvaluateDump(ParseScoreDump(is), LoadManifest(manifest).Select(Partition::kEval),
                      pooling);
}

Outcome ToyEndToEnd() {
  testing::ScratchDir dir("acceptance-toy");
  const std::string cli = PSDET_CLI, c = dir / "corpus", cfg = dir / "toy.ini";
  std::ofstream(cfg) << "[general]\nseed = 7\n\n[model]\nwidth_multiplier = 0.25\n";
  const std::string common = " --config " + cfg;
  if (Shell(std::string(PSDET_TOY) + " --seed 7 --eval-seconds 20 --out-dir " + c) != 0)
    return {false, "corpus generation failed"};
  const std::string sad = " --sad " + (dir / "sad.mdl");
  if (Shell(cli + " train-sad" + common + " --manifest " + c + "/manifest.tsv --out " +
            (dir / "sad.mdl")) != 0)
    return {false, "train-sad failed"};
  const double cpu0 = CpuSeconds(RUSAGE_CHILDREN);
  if (Shell(cli + " train-model" + common + sad + " --manifest " + c + "/manifest.tsv --out " +
            (dir / "net.mdl") + " --log " + (dir / "train.log")) != 0)
    return {false, "train-model failed"};
  const double train_cpu = CpuSeconds(RUSAGE_CHILDREN) - cpu0;
  const std::string models = " --model " + (dir / "net.mdl") + " --backend " + (dir / "backend.mdl");
  if (Shell(cli + " train-backend" + common + sad + " --model " + (dir / "net.mdl") +
            " --manifest " + c + "/manifest.tsv --out " + (dir / "backend.mdl")) != 0)
    return {false, "train-backend failed"};
  for (const char *set : {"manifest", "partial"})
    if (Shell(cli + " score" + common + sad + models + " --manifest " + c + "/" + set +
              ".tsv --out " + (dir / (std::string(set) + ".scores"))) != 0)
      return {false, std::string("score ") + set + " failed"};
  const EvalReport full = Evaluate(dir / "manifest.scores", c + "/manifest.tsv", Pooling::kAverage);
  const EvalReport pavg = Evaluate(dir / "partial.scores", c + "/partial.tsv", Pooling::kAverage);
  const EvalReport pia =
      Evaluate(dir / "partial.scores", c + "/partial.tsv", Pooling::kInterleaved);
  const DatasetManifest m = LoadManifest(c + "/manifest.tsv");
  const size_t n_train = m.Select(Partition::kTrain).entries.size();
  const size_t n_eval = m.Select(Partition::kEval).entries.size() +
                        LoadManifest(c + "/partial.tsv").Select(Partition::kEval).entries.size();
  return {train_cpu <= 600.0 && full.eer < 0.05 && pia.eer < pavg.eer,
          std::to_string(n_train) + " train / " + std::to_string(n_eval) +
              " eval utterances; training " + Fmt("%.0f", train_cpu) +
              " CPU s; full-spoof EER (avg) " + Fmt("%.2f%%", 100 * full.eer) +
              "; partial EER avg " + Fmt("%.2f%%", 100 * pavg.eer) + " vs interleaved " +
              Fmt("%.2f%%", 100 * pia.eer)};
}

// One small run of every stage that writes an artifact.
bool SmallPipeline(const std::string &dir, const std::string &jobs) {
  const std::string cli = PSDET_CLI, c = dir + "/corpus", cfg = dir + "/small.ini";
  fs::create_directories(dir);
  std::ofstream(cfg) << "[general]\nseed = 11\n\n[sad]\nepochs = 1\n\n"
                        "[model]\nwidth_multiplier = 0.125\nblocks_per_stage = 1,1,1,1\n\n"
                        "[train]\nmax_epochs = 2\n\n[gmm]\nn_components = 4\nn_iters = 3\n";
  const std::string common = " --config " + cfg + " --jobs " + jobs;
  const std::string sad = " --sad " + dir + "/sad.mdl", man = " --manifest " + c + "/manifest.tsv";
  const std::vector<std::string> steps{
      std::string(PSDET_TOY) + " --seed 11 --train-per-class 3 --dev-per-class 1 "
                               "--eval-per-class 1 --train-seconds 3 --eval-seconds 4 --out-dir " + c,
      cli + " train-sad" + common + man + " --out " + dir + "/sad.mdl",
      cli + " run-sad" + common + " --model " + dir + "/sad.mdl" + man + " --out-dir " + dir + "/seg",
      cli + " augment" + common + man + " --noise " + c + "/noise.tsv --out-dir " + dir + "/aug",
      cli + " extract-features" + common + sad + man + " --out-dir " + dir + "/lfb",
      cli + " extract-features" + common + sad + " --kind mfcc" + man + " --out-dir " + dir + "/mfcc",
      cli + " train-model" + common + sad + man + " --out " + dir + "/net.mdl --log " + dir + "/train.log",
      cli + " extract-embeddings" + common + sad + " --model " + dir + "/net.mdl" + man +
          " --out-dir " + dir + "/emb",
      cli + " train-backend" + common + sad + " --model " + dir + "/net.mdl" + man + " --out " +
          dir + "/backend.mdl",
      cli + " train-gmm" + common + sad + man + " --out " + dir + "/gmm.mdl",
      cli + " score" + common + sad + " --model " + dir + "/net.mdl --backend " + dir +
          "/backend.mdl" + man + " --out " + dir + "/net.scores",
      cli + " score" + common + sad + " --gmm " + dir + "/gmm.mdl" + man + " --out " + dir +
          "/gmm.scores",
  };
  for (const std::string &s : steps)
    if (Shell(s) != 0) {
      std::fprintf(stderr, "step failed: %s\n", s.c_str());
      return false;
    }
  return true;
}

std::map<std::string, std::string> Tree(const std::string &root) {
  std::map<std::string, std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = Slurp(e.path().string());
  return files;
}

Outcome Determinism() {
  testing::ScratchDir dir("acceptance-determinism");
  if (!SmallPipeline(dir / "a", "1") || !SmallPipeline(dir / "b", "2"))
    return {false, "pipeline failed"};
  const auto a = Tree(dir / "a"), b = Tree(dir / "b");
  int differing = 0;
  std::string first;
  for (const auto &[name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (differing++ == 0) first = name;
    }
  }
  int archives = 0, models = 0, logs = 0, dumps = 0;
  for (const auto &[name, bytes] : a) {
    const std::string ext = fs::path(name).extension().string();
    archives += ext == ".psdf" || ext == ".emb";
    models += ext == ".mdl";
    logs += ext == ".log";
    dumps += ext == ".scores";
  }
  const bool covered = archives > 0 && models == 4 && logs == 1 && dumps == 2;
  return {differing == 0 && a.size() == b.size() && covered,
          std::to_string(a.size()) + " files compared (" + std::to_string(archives) +
              " archives, " + std::to_string(models) + " models, " + std::to_string(logs) +
              " log, " + std::to_string(dumps) + " score dumps) across --jobs 1 and 2, " +
              std::to_string(differing) + " differ" + (first.empty() ? "" : ", first " + first)};
}

}  // namespace
}  // namespace psdet

int main() {
  using psdet::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", psdet::GradientCorrectness},
      {"oc-softmax worked values", psdet::OcSoftmaxValues},
      {"filterbank geometry", psdet::FilterbankGeometry},
      {"snr mixing", psdet::SnrMixing},
      {"em monotonicity", psdet::EmMonotonicity},
      {"plda oracle", psdet::PldaOracle},
      {"eer oracle", psdet::EerOracle},
      {"burst pooling example", psdet::BurstExample},
      {"toy end-to-end", psdet::ToyEndToEnd},
      {"determinism", psdet::Determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); i++) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %zu %s: %s (%s; %.0f s wall)\n", i + 1, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed;
}
