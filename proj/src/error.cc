// psdet/error.cc

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

#include "psdet/error.h"

namespace psdet {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicatePath: return "DuplicatePath";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInputTooShort: return "InputTooShort";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyFeatures: return "EmptyFeatures";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kMissingScores: return "MissingScores";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kZeroPower: return "ZeroPower";
    case ErrorCode::kInvalidMargins: return "InvalidMargins";
    case ErrorCode::kSingularScatter: return "SingularScatter";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kZeroVector: return "ZeroVector";
  }
  return "Unknown";
}

bool IsNumericError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroPower:
    case ErrorCode::kInvalidMargins:
    case ErrorCode::kSingularScatter:
    case ErrorCode::kDegenerateData:
    case ErrorCode::kZeroVector:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
      code_(code) {}

ParseError::ParseError(int line, const std::string &what)
    : Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what),
      line_(line) {}

}  // namespace psdet
