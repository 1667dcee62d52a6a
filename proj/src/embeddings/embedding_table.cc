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

#include "annoflow/embeddings/embedding_table.h"

#include <charconv>
#include <fstream>

#include "annoflow/core/binary_io.h"
#include "annoflow/core/error.h"
#include "annoflow/text/utf8.h"

namespace annoflow::embeddings {

namespace {

constexpr std::string_view kMagic = "ANNOEMB1";

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) {
      ++pos;
    }
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') {
      ++end;
    }
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

}  // namespace

CasePolicy ParseCasePolicy(std::string_view name) {
  if (name == "exact_then_lowercase") return CasePolicy::kExactThenLowercase;
  if (name == "exact_only") return CasePolicy::kExactOnly;
  throw Error(ErrorCode::kConfig, "unknown case policy", std::string(name));
}

std::string_view CasePolicyName(CasePolicy policy) {
  return policy == CasePolicy::kExactOnly ? "exact_only" : "exact_then_lowercase";
}

EmbeddingTable::EmbeddingTable(std::size_t dimension, CasePolicy policy)
    : dimension_(dimension), policy_(policy), zeros_(dimension, 0.0f) {
  if (dimension == 0) throw Error(ErrorCode::kConfig, "embedding dimension must be positive");
}

bool EmbeddingTable::Add(std::string token, std::span<const float> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector has " + std::to_string(vector.size()) + " values, table expects " +
                    std::to_string(dimension_),
                token);
  }
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (!inserted) return false;
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

EmbeddingTable EmbeddingTable::WithPolicy(CasePolicy policy) const {
  EmbeddingTable copy = *this;
  copy.policy_ = policy;
  return copy;
}

LookupResult EmbeddingTable::Lookup(std::string_view token) const {
  std::string key(token);
  auto it = index_.find(key);
  if (it == index_.end() && policy_ == CasePolicy::kExactThenLowercase) {
    it = index_.find(text::AsciiLower(key));
  }
  if (it == index_.end()) return {zeros_, false};
  return {vector(it->second), true};
}

std::vector<std::uint8_t> EmbeddingTable::Serialize() const {
  ByteWriter w;
  w.Magic(kMagic);
  w.U32(static_cast<std::uint32_t>(dimension_));
  w.U64(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    w.String(tokens_[i]);
    for (const float v : vector(i)) w.F32(v);
  }
  return w.Take();
}

EmbeddingTable EmbeddingTable::Deserialize(std::span<const std::uint8_t> bytes,
                                           CasePolicy policy) {
  ByteReader r(bytes, "embedding table");
  r.ExpectMagic(kMagic);
  const std::uint32_t dimension = r.U32();
  const std::uint64_t count = r.U64();
  EmbeddingTable table(dimension, policy);
  std::vector<float> v(dimension);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string token = r.String();
    for (auto &x : v) x = r.F32();
    table.Add(std::move(token), v);
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kParse, "trailing bytes", "embedding table");
  return table;
}

EmbeddingTable LoadGlove(const std::filesystem::path &path,
                         std::optional<std::size_t> expected_dim, CasePolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open embeddings file", path.string());

  std::optional<EmbeddingTable> table;
  std::vector<float> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorCode::kDimensionMismatch, "line has no vector values", path.string(),
                  line_no);
    }
    const std::size_t dim = fields.size() - 1;
    if (!table) {
      if (expected_dim && *expected_dim != dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "file has dimension " + std::to_string(dim) + ", expected " +
                        std::to_string(*expected_dim),
                    "expected_dim", line_no);
      }
      table.emplace(dim, policy);
      values.resize(dim);
    } else if (dim != table->dimension()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "expected " + std::to_string(table->dimension()) + " values, found " +
                      std::to_string(dim),
                  path.string(), line_no);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string_view f = fields[i + 1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::kParse, "bad number '" + std::string(f) + "'", path.string(),
                    line_no);
      }
    }
    table->Add(std::string(fields[0]), values);
  }
  if (!table || table->size() == 0) {
    throw Error(ErrorCode::kEmptyFile, "no embedding entries", path.string());
  }
  return std::move(*table);
}

CoverageReport CoverageStats(const EmbeddingTable &table, const Frame &frame,
                             const std::string &token_column) {
  CoverageReport report;
  for (const auto &record : frame.records) {
    auto it = record.columns.find(token_column);
    if (it == record.columns.end()) continue;
    for (const auto &token : it->second) {
      ++report.tokens_total;
      if (table.Lookup(token.result).found) ++report.tokens_found;
    }
  }
  report.coverage_ratio = static_cast<double>(report.tokens_found) /
                          static_cast<double>(std::max<std::size_t>(report.tokens_total, 1));
  return report;
}

}  // namespace annoflow::embeddings
