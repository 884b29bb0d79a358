// psdet/config.cc

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

#include "psdet/config.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "psdet/error.h"

namespace psdet {

namespace {

struct Field {
  std::string section, key;
  std::function<std::string()> get;
  std::function<void(const std::string &)> set;
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string &s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

long long ParseInt(const std::string &s) {
  size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

bool ParseBool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(s);
}

std::vector<int> ParseIntList(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(ParseInt(item)));
  return out;
}

std::string JoinInts(const std::vector<int> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); i++) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

Field D(const char *sec, const char *key, double *p) {
  return {sec, key, [p] { return Fmt(*p); }, [p](const std::string &s) { *p = ParseDouble(s); }};
}
Field I(const char *sec, const char *key, int *p) {
  return {sec, key, [p] { return std::to_string(*p); },
          [p](const std::string &s) { *p = static_cast<int>(ParseInt(s)); }};
}
Field U(const char *sec, const char *key, uint64_t *p) {
  return {sec, key, [p] { return std::to_string(*p); },
          [p](const std::string &s) { *p = std::stoull(s); }};
}
Field B(const char *sec, const char *key, bool *p) {
  return {sec, key, [p] { return std::string(*p ? "true" : "false"); },
          [p](const std::string &s) { *p = ParseBool(s); }};
}
Field L(const char *sec, const char *key, std::vector<int> *p) {
  return {sec, key, [p] { return JoinInts(*p); },
          [p](const std::string &s) { *p = ParseIntList(s); }};
}

std::vector<Field> Fields(PipelineConfig *c) {
  return {
      U("general", "seed", &c->seed),
      B("sad", "enabled", &c->sad_enabled),
      D("sad", "mvn_window_s", &c->sad.mvn_window_s),
      D("sad", "smooth_window_s", &c->sad.smooth_window_s),
      D("sad", "threshold", &c->sad.threshold),
      D("sad", "pad_s", &c->sad.pad_s),
      I("sad", "epochs", &c->sad_train.epochs),
      I("sad", "batch_size", &c->sad_train.batch_size),
      D("sad", "learning_rate", &c->sad_train.learning_rate),
      D("augment", "snr_db", &c->snr_db),
      B("augment", "freq_mask", &c->train.freq_mask),
      I("augment", "n_masks", &c->train.mask.n_masks),
      I("augment", "max_width", &c->train.mask.max_width),
      L("model", "blocks_per_stage", &c->model.blocks_per_stage),
      L("model", "stage_channels", &c->model.stage_channels),
      D("model", "width_multiplier", &c->model.width_multiplier),
      B("model", "se_enabled", &c->model.se_enabled),
      I("model", "se_reduction", &c->model.se_reduction),
      I("model", "embedding_dim", &c->model.embedding_dim),
      I("model", "input_dim", &c->model.input_dim),
      B("model", "stem_max_pool", &c->model.stem_max_pool),
      D("oc_softmax", "alpha", &c->model.alpha),
      D("oc_softmax", "m0", &c->model.m0),
      D("oc_softmax", "m1", &c->model.m1),
      I("train", "max_epochs", &c->train.max_epochs),
      I("train", "patience", &c->train.patience),
      I("train", "batch_size", &c->train.batch_size),
      I("train", "crop_frames", &c->train.crop_frames),
      I("train", "dev_shift", &c->train.dev_shift),
      D("optimizer", "learning_rate", &c->train.adam.learning_rate),
      D("optimizer", "beta1", &c->train.adam.beta1),
      D("optimizer", "beta2", &c->train.adam.beta2),
      D("optimizer", "eps", &c->train.adam.eps),
      D("optimizer", "weight_decay", &c->train.adam.weight_decay),
      I("embedding", "window", &c->embed_window),
      I("embedding", "shift", &c->embed_shift),
      I("backend", "lda_dim", &c->backend.lda_dim),
      I("backend", "plda_dim", &c->backend.plda_dim),
      I("backend", "plda_iters", &c->backend.plda_iters),
      D("backend", "enroll_fraction", &c->backend.enroll_fraction),
      I("gmm", "n_components", &c->gmm.n_components),
      I("gmm", "n_iters", &c->gmm.n_iters),
      I("gmm", "kmeans_iters", &c->gmm.kmeans_iters),
      I("scoring", "smooth_len", &c->pooling.smooth_len),
      D("scoring", "top_frac", &c->pooling.top_frac),
      I("scoring", "repeats", &c->pooling.repeats),
  };
}

}  // namespace

void PipelineConfig::Set(const std::string &dotted_key, const std::string &value) {
  const size_t dot = dotted_key.find('.');
  const std::string section = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
  const std::string key = dot == std::string::npos ? dotted_key : dotted_key.substr(dot + 1);
  for (Field &f : Fields(this)) {
    if (f.section != section || f.key != key) continue;
    try {
      f.set(value);
    } catch (const std::logic_error &) {
      throw Error(ErrorCode::kInvalidConfig,
                  "cannot parse '" + value + "' for " + section + "." + key);
    }
    return;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown config key " + dotted_key);
}

PipelineConfig PipelineConfig::Parse(std::istream &is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  PipelineConfig cfg;
  for (const auto &[section, body] : tree) {
    if (body.empty())
      throw Error(ErrorCode::kInvalidConfig, "key " + section + " outside any section");
    for (const auto &[key, value] : body) cfg.Set(section + "." + key, value.data());
  }
  cfg.Validate();
  return cfg;
}

PipelineConfig PipelineConfig::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open config " + path);
  try {
    return Parse(is);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string PipelineConfig::ToIni() const {
  PipelineConfig copy = *this;
  std::string out, section;
  for (Field &f : Fields(&copy)) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

void PipelineConfig::PropagateSeed() {
  sad_train.seed = seed;
  train.seed = seed;
  backend.seed = seed;
  gmm.seed = seed;
}

void PipelineConfig::Validate() const {
  model.Validate();
  auto fail = [](const std::string &m) { throw Error(ErrorCode::kInvalidConfig, m); };
  if (embed_window < model.MinFrames()) fail("embedding.window below the network minimum");
  if (embed_shift < 1) fail("embedding.shift must be positive");
  if (train.max_epochs < 0 || train.patience < 0) fail("train epochs must be non-negative");
  if (train.batch_size < 1) fail("train.batch_size must be positive");
  if (train.crop_frames < model.MinFrames()) fail("train.crop_frames below the network minimum");
  if (train.dev_shift < 1) fail("train.dev_shift must be positive");
  if (train.mask.n_masks < 0 || train.mask.max_width < 1) fail("bad frequency-mask settings");
  if (backend.lda_dim < 1 || backend.plda_dim < 0) fail("bad backend dimensions");
  if (!(backend.enroll_fraction > 0.0 && backend.enroll_fraction < 1.0))
    fail("backend.enroll_fraction must lie in (0, 1)");
  if (gmm.n_components < 1 || gmm.n_iters < 0) fail("bad GMM settings");
  if (pooling.smooth_len < 1 || pooling.repeats < 0) fail("bad pooling settings");
  if (!(pooling.top_frac > 0.0 && pooling.top_frac <= 1.0))
    fail("scoring.top_frac must lie in (0, 1]");
  if (!(sad.threshold >= 0.0 && sad.threshold <= 1.0)) fail("sad.threshold must lie in [0, 1]");
  if (sad.pad_s < 0.0) fail("sad.pad_s must be non-negative");
}

}  // namespace psdet
