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

#ifndef ANNOFLOW_CORE_ANNOTATION_H_
#define ANNOFLOW_CORE_ANNOTATION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace annoflow {

enum class AnnotationKind {
  kDocument,
  kSentence,
  kToken,
  kNormalizedToken,
  kWordEmbedding,
  kNamedEntity,
  kChunk,
  kAssertion,
};

std::string_view KindName(AnnotationKind kind);

// Throws Error(kParse) for names outside the closed set.
AnnotationKind ParseKind(std::string_view name);

// A typed span over the source text. Offsets are byte offsets into the UTF-8
// text, 0-based, with an inclusive end.
struct Annotation {
  AnnotationKind kind = AnnotationKind::kDocument;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string result;
  std::map<std::string, std::string> metadata;
  std::optional<std::vector<float>> vector;

  std::size_t length() const { return end - begin + 1; }

  bool operator==(const Annotation &) const = default;
};

// Orders annotations by (begin, end).
inline bool SpanLess(const Annotation &a, const Annotation &b) {
  return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
}

// True when `inner` lies within `outer`.
inline bool Contains(const Annotation &outer, const Annotation &inner) {
  return outer.begin <= inner.begin && inner.end <= outer.end;
}

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_ANNOTATION_H_
