// psdet/binary-io.h

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

// Little-endian binary containers: the feature archive and the named-tensor
// model file shared by every trained model in the toolkit.
//
// Feature archive:
//   "PSDF" | u32 version | u32 kind | u32 T | u32 D | T*D f32 (row-major)
//
// Model file:
//   "PSDM" | u32 version | u32 model kind | u32 n + n bytes config echo |
//   u32 tensor count | tensors...
// Each tensor:
//   u32 name length | name (UTF-8) | u32 rank | rank * u32 dims | f32 data

#ifndef PSDET_BINARY_IO_H_
#define PSDET_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "psdet/features.h"

namespace psdet {

inline constexpr uint32_t kFeatureArchiveVersion = 1;
inline constexpr uint32_t kModelFileVersion = 1;

std::string EncodeFeatureArchive(const FeatureMatrix &features);
FeatureMatrix DecodeFeatureArchive(std::string_view bytes);
void WriteFeatureArchive(const FeatureMatrix &features, const std::string &path);
FeatureMatrix ReadFeatureArchive(const std::string &path);

enum class ModelKind : uint32_t {
  kXResNet = 1,
  kSad = 2,
  kBackend = 3,
  kGmm = 4,
};

const char *ModelKindName(ModelKind kind);

struct NamedTensor {
  std::string name;
  std::vector<uint32_t> dims;
  std::vector<float> data;

  size_t NumElements() const;
};

class ModelFile {
 public:
  ModelFile() = default;
  ModelFile(ModelKind kind, std::string config_echo)
      : kind_(kind), config_echo_(std::move(config_echo)) {}

  ModelKind kind() const { return kind_; }
  const std::string &config_echo() const { return config_echo_; }
  const std::vector<NamedTensor> &tensors() const { return tensors_; }

  void Add(std::string name, std::vector<uint32_t> dims, std::vector<float> data);
  void AddMatrix(const std::string &name, const Matrix &m);
  void AddVector(const std::string &name, const Vector &v);
  void AddScalar(const std::string &name, double value);

  // Throws CorruptFile when the name is absent.
  const NamedTensor &Get(const std::string &name) const;
  bool Has(const std::string &name) const;
  Matrix GetMatrix(const std::string &name) const;
  Vector GetVector(const std::string &name) const;
  double GetScalar(const std::string &name) const;

  std::string Encode() const;
  // Throws VersionMismatch on a version or (when expected is given) kind
  // mismatch, CorruptFile on truncation.
  static ModelFile Decode(std::string_view bytes);
  static ModelFile Read(const std::string &path, ModelKind expected);

  void Write(const std::string &path) const;

 private:
  ModelKind kind_ = ModelKind::kXResNet;
  std::string config_echo_;
  std::vector<NamedTensor> tensors_;
};

std::string ReadFileBytes(const std::string &path);
void WriteFileBytes(const std::string &path, std::string_view bytes);

}  // namespace psdet

#endif  // PSDET_BINARY_IO_H_
