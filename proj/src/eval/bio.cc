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

#include "annoflow/eval/bio.h"

#include <algorithm>
#include <set>

namespace annoflow::eval {

std::optional<BioTag> ParseBio(std::string_view label) {
  if (label == kOutside) return BioTag{};
  if (label.size() < 3 || label[1] != '-') return std::nullopt;
  BioTag tag;
  if (label[0] == 'B') {
    tag.prefix = BioTag::Prefix::kBegin;
  } else if (label[0] == 'I') {
    tag.prefix = BioTag::Prefix::kInside;
  } else {
    return std::nullopt;
  }
  tag.type = std::string(label.substr(2));
  return tag;
}

bool BioTransitionAllowed(std::string_view prev, std::string_view label) {
  const auto cur = ParseBio(label);
  if (!cur) return false;
  if (cur->prefix != BioTag::Prefix::kInside) return true;
  if (prev.empty()) return false;
  const auto before = ParseBio(prev);
  return before && before->prefix != BioTag::Prefix::kOutside && before->type == cur->type;
}

bool IsValidBio(std::span<const std::string> labels) {
  std::string_view prev;
  for (const auto &label : labels) {
    if (!BioTransitionAllowed(prev, label)) return false;
    prev = label;
  }
  return true;
}

std::vector<std::string> CanonicalInventory(std::vector<std::string> labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  unique.erase(kOutside);
  std::vector<std::string> out{kOutside};
  out.insert(out.end(), unique.begin(), unique.end());
  return out;
}

}  // namespace annoflow::eval
