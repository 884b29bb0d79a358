// psdet/audio-io.h

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

#ifndef PSDET_AUDIO_IO_H_
#define PSDET_AUDIO_IO_H_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace psdet {

inline constexpr int kSampleRate = 16000;

// Mono waveform, samples in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = kSampleRate;

  double Duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file holding 16-bit mono PCM at 16 kHz.  Samples are
// scaled by 1/32768.  Anything else throws UnsupportedFormat; truncated or
// malformed chunks throw CorruptFile.  No resampling is ever done.
AudioBuffer ReadWav(const std::string &path);
AudioBuffer ReadWav(std::istream &is);

// Writes 16-bit mono PCM.  Samples are quantized as round(x * 32768) and
// clipped to the int16 range, so ReadWav(WriteWav(ReadWav(f))) is exact.
void WriteWav(const AudioBuffer &audio, const std::string &path);
std::string EncodeWav(const AudioBuffer &audio);

enum class Label { kPristine, kSpoof };
enum class Partition { kTrain, kDev, kEval };

const char *LabelName(Label label);
const char *PartitionName(Partition partition);

struct ManifestEntry {
  std::string audio_path;
  Label label = Label::kPristine;
  std::string class_id;
  Partition partition = Partition::kTrain;

  bool operator==(const ManifestEntry &) const = default;
};

// One entry per line: <path>\t<label>\t<class_id>\t<partition>.  Lines
// starting with '#' and blank lines are skipped.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  bool operator==(const DatasetManifest &) const = default;

  DatasetManifest Select(Partition partition) const;
};

DatasetManifest LoadManifest(const std::string &path);
DatasetManifest ParseManifest(std::istream &is);
std::string SerializeManifest(const DatasetManifest &manifest);
void WriteManifest(const DatasetManifest &manifest, const std::string &path);

// Resolves a manifest-relative audio path against the manifest's directory.
std::string ResolveManifestPath(const std::string &manifest_path,
                                const std::string &audio_path);

}  // namespace psdet

#endif  // PSDET_AUDIO_IO_H_
