// psdet/audio-io.cc

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

#include "psdet/audio-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "psdet/error.h"

namespace psdet {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; i++) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer ReadWav(std::istream &is) {
  std::string bytes((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
  const auto *data = reinterpret_cast<const unsigned char *>(bytes.data());
  const size_t size = bytes.size();
  if (size < 12)
    throw Error(ErrorCode::kCorruptFile, "file shorter than RIFF header");
  if (std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");

  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char *chunk = data + pos;
    uint32_t chunk_size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + chunk_size > size)
        throw Error(ErrorCode::kCorruptFile, "truncated fmt chunk");
      uint16_t format = ReadU16(data + body);
      uint16_t channels = ReadU16(data + body + 2);
      uint32_t rate = ReadU32(data + body + 4);
      uint16_t bits = ReadU16(data + body + 14);
      if (format != 1)
        throw Error(ErrorCode::kUnsupportedFormat,
                    "audio format " + std::to_string(format) + " is not PCM");
      if (channels != 1)
        throw Error(ErrorCode::kUnsupportedFormat,
                    std::to_string(channels) + " channels, expected mono");
      if (bits != 16)
        throw Error(ErrorCode::kUnsupportedFormat,
                    std::to_string(bits) + "-bit samples, expected 16");
      if (rate != static_cast<uint32_t>(kSampleRate))
        throw Error(ErrorCode::kUnsupportedFormat,
                    "sample rate " + std::to_string(rate) + ", expected 16000");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt)
        throw Error(ErrorCode::kCorruptFile, "data chunk before fmt chunk");
      if (body + chunk_size > size)
        throw Error(ErrorCode::kCorruptFile, "truncated data chunk");
      if (chunk_size % 2 != 0)
        throw Error(ErrorCode::kCorruptFile, "odd byte count in 16-bit data");
      AudioBuffer audio;
      audio.sample_rate = kSampleRate;
      audio.samples.resize(chunk_size / 2);
      for (size_t i = 0; i < audio.samples.size(); i++) {
        auto v = static_cast<int16_t>(ReadU16(data + body + 2 * i));
        audio.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      return audio;
    }
    // Chunks are padded to even length.
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw Error(ErrorCode::kCorruptFile,
              have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioBuffer ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open " + path);
  try {
    return ReadWav(is);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string EncodeWav(const AudioBuffer &audio) {
  if (audio.sample_rate != kSampleRate)
    throw Error(ErrorCode::kUnsupportedFormat, "only 16 kHz audio is written");
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, 1);
  PutU32(&out, kSampleRate);
  PutU32(&out, kSampleRate * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, data_bytes);
  for (float x : audio.samples) {
    double q = std::round(static_cast<double>(x) * 32768.0);
    q = std::clamp(q, -32768.0, 32767.0);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  return out;
}

void WriteWav(const AudioBuffer &audio, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  std::string bytes = EncodeWav(audio);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

const char *LabelName(Label label) {
  return label == Label::kPristine ? "pristine" : "spoof";
}

const char *PartitionName(Partition partition) {
  switch (partition) {
    case Partition::kTrain: return "train";
    case Partition::kDev: return "dev";
    case Partition::kEval: return "eval";
  }
  return "?";
}

DatasetManifest DatasetManifest::Select(Partition partition) const {
  DatasetManifest out;
  for (const auto &e : entries)
    if (e.partition == partition) out.entries.push_back(e);
  return out;
}

DatasetManifest ParseManifest(std::istream &is) {
  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    ManifestEntry entry;
    entry.audio_path = fields[0];
    if (entry.audio_path.empty()) throw ParseError(line_no, "empty audio path");
    if (fields[1] == "pristine") {
      entry.label = Label::kPristine;
    } else if (fields[1] == "spoof") {
      entry.label = Label::kSpoof;
    } else {
      throw ParseError(line_no, "unknown label '" + fields[1] +
                                    "' (expected pristine or spoof)");
    }
    entry.class_id = fields[2];
    if (entry.class_id.empty()) throw ParseError(line_no, "empty class_id");
    if (fields[3] == "train") {
      entry.partition = Partition::kTrain;
    } else if (fields[3] == "dev") {
      entry.partition = Partition::kDev;
    } else if (fields[3] == "eval") {
      entry.partition = Partition::kEval;
    } else {
      throw ParseError(line_no, "unknown partition '" + fields[3] + "'");
    }
    if (!seen.insert(entry.audio_path).second)
      throw Error(ErrorCode::kDuplicatePath,
                  "line " + std::to_string(line_no) + ": " + entry.audio_path);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest LoadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open manifest " + path);
  return ParseManifest(is);
}

std::string SerializeManifest(const DatasetManifest &manifest) {
  std::ostringstream os;
  for (const auto &e : manifest.entries)
    os << e.audio_path << '\t' << LabelName(e.label) << '\t' << e.class_id
       << '\t' << PartitionName(e.partition) << '\n';
  return os.str();
}

void WriteManifest(const DatasetManifest &manifest, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << SerializeManifest(manifest);
}

std::string ResolveManifestPath(const std::string &manifest_path,
                                const std::string &audio_path) {
  std::filesystem::path p(audio_path);
  if (p.is_absolute()) return audio_path;
  return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

}  // namespace psdet
