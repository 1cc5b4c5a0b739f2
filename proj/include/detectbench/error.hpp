//
// Copyright 2026 The detectbench Authors
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
//

#pragma once

#include <stdexcept>
#include <string>

namespace detectbench {

enum class ErrorCode {
  kEmptyClass,
  kNonFiniteScore,
  kInvalidDecay,
  kEmptyScenarios,
  kEmptyCorpus,
  kUnknownWord,
  kInvalidKnob,
  kEmptyVocab,
  kProviderFailure,
  kDegenerateRanks,
  kEmptyInput,
  kSchemaViolation,
  kUnknownLabel,
  kDuplicateId,
  kIncompleteRun,
  kIo,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kInvalidDecay: return "InvalidDecay";
    case ErrorCode::kEmptyScenarios: return "EmptyScenarios";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kUnknownWord: return "UnknownWord";
    case ErrorCode::kInvalidKnob: return "InvalidKnob";
    case ErrorCode::kEmptyVocab: return "EmptyVocab";
    case ErrorCode::kProviderFailure: return "ProviderFailure";
    case ErrorCode::kDegenerateRanks: return "DegenerateRanks";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kIncompleteRun: return "IncompleteRun";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures surface as this exception; `code()` identifies the
// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the error-class prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace detectbench
