// psdet/error.h

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

#ifndef PSDET_ERROR_H_
#define PSDET_ERROR_H_

#include <stdexcept>
#include <string>

namespace psdet {

enum class ErrorCode {
  kUnsupportedFormat,
  kCorruptFile,
  kParseError,
  kDuplicatePath,
  kTooShort,
  kDimensionMismatch,
  kEmptyResult,
  kInsufficientData,
  kInvalidConfig,
  kInputTooShort,
  kShapeMismatch,
  kEmptyFeatures,
  kEmptySeries,
  kEmptyClass,
  kTooFewFrames,
  kVersionMismatch,
  kMissingScores,
  kIoError,
  // Numeric failures.
  kZeroPower,
  kInvalidMargins,
  kSingularScatter,
  kDegenerateData,
  kZeroVector,
};

const char *ErrorCodeName(ErrorCode code);

// True for codes that signal a numeric failure rather than bad input data.
bool IsNumericError(ErrorCode code);

// The single exception type thrown by the library.  The code identifies the
// failure; the message carries the details (file, line number, sizes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse errors additionally remember the offending 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string &what);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace psdet

#endif  // PSDET_ERROR_H_
