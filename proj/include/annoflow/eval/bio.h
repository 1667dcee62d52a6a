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

#ifndef ANNOFLOW_EVAL_BIO_H_
#define ANNOFLOW_EVAL_BIO_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace annoflow::eval {

inline constexpr const char kOutside[] = "O";

struct BioTag {
  enum class Prefix { kOutside, kBegin, kInside };
  Prefix prefix = Prefix::kOutside;
  std::string type;
};

// "O", "B-<type>" or "I-<type>" with a non-empty type; nullopt otherwise.
std::optional<BioTag> ParseBio(std::string_view label);

// True when `label` may follow `prev` ("" for the sequence start): an I-X
// only continues a B-X or I-X.
bool BioTransitionAllowed(std::string_view prev, std::string_view label);

// Every label parses and every transition is allowed.
bool IsValidBio(std::span<const std::string> labels);

// Inventory order used across the engine: "O" first, then the remaining
// labels sorted.
std::vector<std::string> CanonicalInventory(std::vector<std::string> labels);

}  // namespace annoflow::eval

#endif  // ANNOFLOW_EVAL_BIO_H_
