// psdet/binary-io.cc

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

#include "psdet/binary-io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "psdet/error.h"

namespace psdet {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

namespace {

class Writer {
 public:
  void U32(uint32_t v) { Raw(&v, 4); }
  void F32(float v) { Raw(&v, 4); }
  void Bytes(std::string_view s) { out_.append(s); }
  void Raw(const void *p, size_t n) { out_.append(static_cast<const char *>(p), n); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t U32() {
    uint32_t v;
    Raw(&v, 4);
    return v;
  }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void Floats(float *dst, size_t n) { Raw(dst, n * sizeof(float)); }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw Error(ErrorCode::kCorruptFile, "unexpected end of data");
  }
  void Raw(void *dst, size_t n) {
    Need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string ReadFileBytes(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string &path, std::string_view bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

std::string EncodeFeatureArchive(const FeatureMatrix &features) {
  Writer w;
  w.Bytes("PSDF");
  w.U32(kFeatureArchiveVersion);
  w.U32(static_cast<uint32_t>(features.kind));
  w.U32(static_cast<uint32_t>(features.NumFrames()));
  w.U32(static_cast<uint32_t>(features.Dim()));
  for (Eigen::Index t = 0; t < features.values.rows(); t++)
    for (Eigen::Index d = 0; d < features.values.cols(); d++)
      w.F32(static_cast<float>(features.values(t, d)));
  return w.Take();
}

FeatureMatrix DecodeFeatureArchive(std::string_view bytes) {
  Reader r(bytes);
  if (r.Bytes(4) != "PSDF")
    throw Error(ErrorCode::kCorruptFile, "bad feature archive magic");
  uint32_t version = r.U32();
  if (version != kFeatureArchiveVersion)
    throw Error(ErrorCode::kVersionMismatch,
                "feature archive version " + std::to_string(version));
  uint32_t kind = r.U32();
  if (kind > static_cast<uint32_t>(FeatureKind::kEmbedding))
    throw Error(ErrorCode::kCorruptFile, "unknown feature kind " + std::to_string(kind));
  uint32_t rows = r.U32(), cols = r.U32();
  std::vector<float> data(static_cast<size_t>(rows) * cols);
  r.Floats(data.data(), data.size());
  if (!r.AtEnd()) throw Error(ErrorCode::kCorruptFile, "trailing bytes in archive");
  FeatureMatrix out;
  out.kind = static_cast<FeatureKind>(kind);
  out.values.resize(rows, cols);
  for (uint32_t t = 0; t < rows; t++)
    for (uint32_t d = 0; d < cols; d++) out.values(t, d) = data[t * cols + d];
  return out;
}

void WriteFeatureArchive(const FeatureMatrix &features, const std::string &path) {
  WriteFileBytes(path, EncodeFeatureArchive(features));
}

FeatureMatrix ReadFeatureArchive(const std::string &path) {
  try {
    return DecodeFeatureArchive(ReadFileBytes(path));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kIoError) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

const char *ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kXResNet: return "xresnet";
    case ModelKind::kSad: return "sad";
    case ModelKind::kBackend: return "backend";
    case ModelKind::kGmm: return "gmm";
  }
  return "unknown";
}

size_t NamedTensor::NumElements() const {
  size_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

void ModelFile::Add(std::string name, std::vector<uint32_t> dims,
                    std::vector<float> data) {
  NamedTensor t{std::move(name), std::move(dims), std::move(data)};
  if (t.NumElements() != t.data.size())
    throw Error(ErrorCode::kShapeMismatch, "tensor " + t.name + " dims/data mismatch");
  tensors_.push_back(std::move(t));
}

void ModelFile::AddMatrix(const std::string &name, const Matrix &m) {
  std::vector<float> data(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); i++)
    for (Eigen::Index j = 0; j < m.cols(); j++)
      data[i * m.cols() + j] = static_cast<float>(m(i, j));
  Add(name, {static_cast<uint32_t>(m.rows()), static_cast<uint32_t>(m.cols())},
      std::move(data));
}

void ModelFile::AddVector(const std::string &name, const Vector &v) {
  std::vector<float> data(v.data(), v.data() + v.size());
  Add(name, {static_cast<uint32_t>(v.size())}, std::move(data));
}

void ModelFile::AddScalar(const std::string &name, double value) {
  Add(name, {}, {static_cast<float>(value)});
}

bool ModelFile::Has(const std::string &name) const {
  for (const auto &t : tensors_)
    if (t.name == name) return true;
  return false;
}

const NamedTensor &ModelFile::Get(const std::string &name) const {
  for (const auto &t : tensors_)
    if (t.name == name) return t;
  throw Error(ErrorCode::kCorruptFile, "model file lacks tensor '" + name + "'");
}

Matrix ModelFile::GetMatrix(const std::string &name) const {
  const NamedTensor &t = Get(name);
  if (t.dims.size() != 2)
    throw Error(ErrorCode::kShapeMismatch, name + " is not a matrix");
  Matrix m(t.dims[0], t.dims[1]);
  for (uint32_t i = 0; i < t.dims[0]; i++)
    for (uint32_t j = 0; j < t.dims[1]; j++) m(i, j) = t.data[i * t.dims[1] + j];
  return m;
}

Vector ModelFile::GetVector(const std::string &name) const {
  const NamedTensor &t = Get(name);
  if (t.dims.size() != 1)
    throw Error(ErrorCode::kShapeMismatch, name + " is not a vector");
  Vector v(t.dims[0]);
  for (uint32_t i = 0; i < t.dims[0]; i++) v(i) = t.data[i];
  return v;
}

double ModelFile::GetScalar(const std::string &name) const {
  const NamedTensor &t = Get(name);
  if (t.data.size() != 1)
    throw Error(ErrorCode::kShapeMismatch, name + " is not a scalar");
  return t.data[0];
}

std::string ModelFile::Encode() const {
  Writer w;
  w.Bytes("PSDM");
  w.U32(kModelFileVersion);
  w.U32(static_cast<uint32_t>(kind_));
  w.U32(static_cast<uint32_t>(config_echo_.size()));
  w.Bytes(config_echo_);
  w.U32(static_cast<uint32_t>(tensors_.size()));
  for (const auto &t : tensors_) {
    w.U32(static_cast<uint32_t>(t.name.size()));
    w.Bytes(t.name);
    w.U32(static_cast<uint32_t>(t.dims.size()));
    for (uint32_t d : t.dims) w.U32(d);
    w.Raw(t.data.data(), t.data.size() * sizeof(float));
  }
  return w.Take();
}

ModelFile ModelFile::Decode(std::string_view bytes) {
  Reader r(bytes);
  if (r.Bytes(4) != "PSDM") throw Error(ErrorCode::kCorruptFile, "bad model magic");
  uint32_t version = r.U32();
  if (version != kModelFileVersion)
    throw Error(ErrorCode::kVersionMismatch,
                "model file version " + std::to_string(version) + ", expected " +
                    std::to_string(kModelFileVersion));
  ModelFile file;
  file.kind_ = static_cast<ModelKind>(r.U32());
  file.config_echo_ = r.Bytes(r.U32());
  uint32_t count = r.U32();
  for (uint32_t i = 0; i < count; i++) {
    NamedTensor t;
    t.name = r.Bytes(r.U32());
    uint32_t rank = r.U32();
    if (rank > 8) throw Error(ErrorCode::kCorruptFile, "implausible tensor rank");
    t.dims.resize(rank);
    for (auto &d : t.dims) d = r.U32();
    t.data.resize(t.NumElements());
    r.Floats(t.data.data(), t.data.size());
    file.tensors_.push_back(std::move(t));
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kCorruptFile, "trailing bytes in model file");
  return file;
}

ModelFile ModelFile::Read(const std::string &path, ModelKind expected) {
  ModelFile file;
  try {
    file = Decode(ReadFileBytes(path));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kIoError) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
  if (file.kind() != expected)
    throw Error(ErrorCode::kVersionMismatch,
                path + ": holds a " + ModelKindName(file.kind()) + " model, expected " +
                    ModelKindName(expected));
  return file;
}

void ModelFile::Write(const std::string &path) const {
  WriteFileBytes(path, Encode());
}

}  // namespace psdet
