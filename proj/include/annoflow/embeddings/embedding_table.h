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

#ifndef ANNOFLOW_EMBEDDINGS_EMBEDDING_TABLE_H_
#define ANNOFLOW_EMBEDDINGS_EMBEDDING_TABLE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "annoflow/core/frame.h"

namespace annoflow::embeddings {

enum class CasePolicy { kExactThenLowercase, kExactOnly };

CasePolicy ParseCasePolicy(std::string_view name);
std::string_view CasePolicyName(CasePolicy policy);

struct LookupResult {
  std::span<const float> vector;  // always dimension() long
  bool found = false;
};

// Word-vector table. Immutable once loaded; out-of-vocabulary tokens map to
// the zero vector.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension,
                          CasePolicy policy = CasePolicy::kExactThenLowercase);

  // Returns false (and keeps the first vector) for a repeated token.
  bool Add(std::string token, std::span<const float> vector);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  CasePolicy case_policy() const { return policy_; }
  EmbeddingTable WithPolicy(CasePolicy policy) const;

  // Exact match, then (under kExactThenLowercase) the ASCII-lowercased form.
  LookupResult Lookup(std::string_view token) const;

  const std::string &token(std::size_t i) const { return tokens_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {values_.data() + i * dimension_, dimension_};
  }

  // Cached binary form: "ANNOEMB1", u32 dimension, u64 count, then per entry
  // a u32-length-prefixed token and dimension little-endian float32 values.
  std::vector<std::uint8_t> Serialize() const;
  static EmbeddingTable Deserialize(std::span<const std::uint8_t> bytes,
                                    CasePolicy policy = CasePolicy::kExactThenLowercase);

 private:
  std::size_t dimension_;
  CasePolicy policy_;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::vector<float> zeros_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads GloVe text format ("token v1 ... vd" per line). The dimension is taken
// from the first line. Errors: EmptyFile, DimensionMismatch (with line number;
// subject "expected_dim" when `expected_dim` disagrees), Parse, Io.
EmbeddingTable LoadGlove(const std::filesystem::path &path,
                         std::optional<std::size_t> expected_dim = std::nullopt,
                         CasePolicy policy = CasePolicy::kExactThenLowercase);

struct CoverageReport {
  std::size_t tokens_total = 0;
  std::size_t tokens_found = 0;
  double coverage_ratio = 0.0;
};

CoverageReport CoverageStats(const EmbeddingTable &table, const Frame &frame,
                             const std::string &token_column = "token");

}  // namespace annoflow::embeddings

#endif  // ANNOFLOW_EMBEDDINGS_EMBEDDING_TABLE_H_
