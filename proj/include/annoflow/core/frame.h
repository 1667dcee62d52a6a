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

#ifndef ANNOFLOW_CORE_FRAME_H_
#define ANNOFLOW_CORE_FRAME_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annoflow/core/annotation.h"

namespace annoflow {

// Name of the raw text column every pipeline starts from.
inline constexpr const char kTextColumn[] = "text";

using Column = std::vector<Annotation>;

struct DocumentRecord {
  std::string id;
  std::string text;
  std::map<std::string, Column> columns;
  // Record-level failure captured during ingestion or transform. A record
  // with an error is passed through untouched by later stages.
  std::optional<std::string> error;

  bool HasColumn(const std::string &name) const {
    return columns.find(name) != columns.end();
  }
  // Throws Error(kMissingInput) naming the column.
  const Column &column(const std::string &name) const;

  bool operator==(const DocumentRecord &) const = default;
};

using Schema = std::map<std::string, AnnotationKind>;

struct Frame {
  std::vector<DocumentRecord> records;
  Schema schema;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }

  bool operator==(const Frame &) const = default;
};

// Schema derived from the annotation kinds present in the records. Columns
// that are empty in every record are omitted.
Schema InferSchema(const std::vector<DocumentRecord> &records);

// Annotations of `column` lying inside `span`, in order.
std::vector<const Annotation *> AnnotationsWithin(const Column &column,
                                                  const Annotation &span);

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_FRAME_H_
