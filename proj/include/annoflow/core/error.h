// Copyright 2026 The Annoflow Authors.
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

#ifndef ANNOFLOW_CORE_ERROR_H_
#define ANNOFLOW_CORE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace annoflow {

enum class ErrorCode {
  kInvalidArgument,
  kMissingInput,
  kKindMismatch,
  kDuplicateOutput,
  kUnknownStageType,
  kConfig,
  kIo,
  kParse,
  kEmptyFile,
  kDimensionMismatch,
  kInvalidLabel,
  kRaggedLine,
  kLengthMismatch,
  kNumeric,
  kChecksumMismatch,
  kUnsupportedVersion,
  kAlignment,
  kDirectoryNotEmpty,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the engine. `subject` names the offending
// column, stage, blob or file; `line` is 1-based when the error comes from a
// text file, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message, std::string subject = {},
        std::size_t line = 0);

  ErrorCode code() const { return code_; }
  const std::string &subject() const { return subject_; }
  std::size_t line() const { return line_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::size_t line_;
};

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_ERROR_H_
