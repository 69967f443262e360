// Copyright 2026 The AmbigNLG Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ambig {

// Values are shared with the C API (ambig_status); keep them stable.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kEmptyFiller = 2,
  kWrongArity = 3,
  kDuplicateCategory = 4,
  kInvalidCategory = 5,
  kTooFewSamples = 6,
  kEmptyCandidates = 7,
  kLengthMismatch = 8,
  kMissingField = 9,
  kUnparseableJudgment = 10,
  kProviderUnavailable = 11,
  kBudgetExceeded = 12,
  kEmbedUnsupported = 13,
  kParseError = 14,
  kDuplicateId = 15,
  kIoError = 16,
  kEmptyPool = 17,
  kMissingAnnotations = 18,
  kUnknownSession = 19,
  kIndexOutOfRange = 20,
  kUnrenderableCustomText = 21,
  kEmptyInstruction = 22,
  kInvalidRecord = 23,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transport-level failure that the gateway may retry.
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ambig
