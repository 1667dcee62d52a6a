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

#include "annoflow/core/annotation.h"

#include <algorithm>
#include <array>
#include <utility>

#include "annoflow/core/error.h"
#include "annoflow/core/frame.h"

namespace annoflow {

namespace {

constexpr std::array<std::pair<AnnotationKind, std::string_view>, 8> kKinds = {{
    {AnnotationKind::kDocument, "document"},
    {AnnotationKind::kSentence, "sentence"},
    {AnnotationKind::kToken, "token"},
    {AnnotationKind::kNormalizedToken, "normalized_token"},
    {AnnotationKind::kWordEmbedding, "word_embedding"},
    {AnnotationKind::kNamedEntity, "named_entity"},
    {AnnotationKind::kChunk, "chunk"},
    {AnnotationKind::kAssertion, "assertion"},
}};

}  // namespace

std::string_view KindName(AnnotationKind kind) {
  for (const auto &[k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

AnnotationKind ParseKind(std::string_view name) {
  for (const auto &[k, n] : kKinds) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kParse, "unknown annotation kind", std::string(name));
}

const Column &DocumentRecord::column(const std::string &name) const {
  auto it = columns.find(name);
  if (it == columns.end()) {
    throw Error(ErrorCode::kMissingInput,
                "record '" + id + "' has no column '" + name + "'", name);
  }
  return it->second;
}

Schema InferSchema(const std::vector<DocumentRecord> &records) {
  Schema schema;
  for (const auto &record : records) {
    for (const auto &[name, column] : record.columns) {
      if (!column.empty()) schema.emplace(name, column.front().kind);
    }
  }
  return schema;
}

std::vector<const Annotation *> AnnotationsWithin(const Column &column,
                                                  const Annotation &span) {
  std::vector<const Annotation *> out;
  auto it = std::lower_bound(
      column.begin(), column.end(), span.begin,
      [](const Annotation &a, std::size_t pos) { return a.begin < pos; });
  for (; it != column.end() && it->begin <= span.end; ++it) {
    if (it->end <= span.end) out.push_back(&*it);
  }
  return out;
}

}  // namespace annoflow
