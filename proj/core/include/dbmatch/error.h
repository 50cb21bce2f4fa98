// Copyright 2026 The dbmatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DBMATCH_ERROR_H_
#define DBMATCH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dbmatch {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidPmf,
  kIndependentDatabases,
  kAlphabetTooLarge,
  kEnumerationCapExceeded,
  kDegenerateGap,
  kSearchCapExceeded,
  kRunMismatch,
  kArityMismatch,
  kSizeOverflow,
  kConfig,
  kIo,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // Caps and independence are properties of the experiment setup, not of the
  // matching algorithm; trials that hit them are reported separately.
  bool is_infrastructure() const {
    return code_ == ErrorCode::kSearchCapExceeded ||
           code_ == ErrorCode::kIndependentDatabases ||
           code_ == ErrorCode::kEnumerationCapExceeded ||
           code_ == ErrorCode::kAlphabetTooLarge ||
           code_ == ErrorCode::kSizeOverflow;
  }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidPmf: return "InvalidPmf";
    case ErrorCode::kIndependentDatabases: return "IndependentDatabases";
    case ErrorCode::kAlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorCode::kEnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::kDegenerateGap: return "DegenerateGap";
    case ErrorCode::kSearchCapExceeded: return "SearchCapExceeded";
    case ErrorCode::kRunMismatch: return "RunMismatch";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kSizeOverflow: return "SizeOverflow";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace dbmatch

#endif  // DBMATCH_ERROR_H_
