// psdet/tools/psdet-toy.cc

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

// Writes the synthetic toy corpus used by the end-to-end checks.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "psdet/error.h"
#include "psdet/toy-corpus.h"

int main(int argc, char **argv) {
  CLI::App app{"psdet-toy: write the synthetic toy corpus"};
  std::string out_dir;
  psdet::ToyCorpusOptions opts;
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--seed", opts.seed);
  app.add_option("--train-per-class", opts.train_per_class);
  app.add_option("--dev-per-class", opts.dev_per_class);
  app.add_option("--eval-per-class", opts.eval_per_class);
  app.add_option("--train-seconds", opts.train_seconds);
  app.add_option("--eval-seconds", opts.eval_seconds);
  app.add_option("--insert-fraction", opts.insert_fraction);
  app.add_option("--artifact-db", opts.artifact_db);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    const psdet::ToyCorpusPaths paths = psdet::WriteToyCorpus(out_dir, opts);
    std::printf("%s\n%s\n%s\n", paths.manifest.c_str(), paths.partial_manifest.c_str(),
                paths.noise_manifest.c_str());
  } catch (const psdet::Error &e) {
    std::cerr << "psdet-toy: " << e.what() << "\n";
    return psdet::IsNumericError(e.code()) ? 3 : 2;
  }
  return 0;
}
