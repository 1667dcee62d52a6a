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

#ifndef ANNOFLOW_CORE_JSONL_H_
#define ANNOFLOW_CORE_JSONL_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "annoflow/core/frame.h"
#include "json.hpp"

namespace annoflow {

using Json = nlohmann::json;

// Record interchange format, one JSON object per line:
//   {"id": str, "text": str, "columns": {name: [annotation...]}, "error"?: str}
// Object keys are emitted in sorted order, so serialization is canonical.
Json AnnotationToJson(const Annotation &annotation);
Annotation AnnotationFromJson(const Json &json);

Json RecordToJson(const DocumentRecord &record);
// Throws Error(kParse) when required fields are missing or mistyped.
DocumentRecord RecordFromJson(const Json &json);

std::string SerializeRecord(const DocumentRecord &record);
std::string SerializeFrame(const Frame &frame);

// Parses one JSONL line. Malformed lines never throw: they come back as a
// record with `error` set and id "line-<n>" (or the parsed id if available).
DocumentRecord ParseRecordLine(const std::string &line, std::size_t line_no);

Frame ReadFrame(std::istream &in);
Frame ReadFrameFile(const std::filesystem::path &path);
void WriteFrame(const Frame &frame, std::ostream &out);
void WriteFrameFile(const Frame &frame, const std::filesystem::path &path);

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_JSONL_H_
