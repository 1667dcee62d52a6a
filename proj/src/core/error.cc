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

#include "annoflow/core/error.h"

namespace annoflow {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kDuplicateOutput: return "DuplicateOutput";
    case ErrorCode::kUnknownStageType: return "UnknownStageType";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kRaggedLine: return "RaggedLine";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNumeric: return "NumericError";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kAlignment: return "AlignmentError";
    case ErrorCode::kDirectoryNotEmpty: return "DirectoryNotEmpty";
  }
  return "Unknown";
}

namespace {

std::string Compose(ErrorCode code, const std::string &message,
                    const std::string &subject, std::size_t line) {
  std::string out(ErrorCodeName(code));
  if (!subject.empty()) out += "(" + subject + ")";
  if (line > 0) out += " at line " + std::to_string(line);
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string &message, std::string subject,
             std::size_t line)
    : std::runtime_error(Compose(code, message, subject, line)),
      code_(code),
      subject_(std::move(subject)),
      line_(line) {}

}  // namespace annoflow
