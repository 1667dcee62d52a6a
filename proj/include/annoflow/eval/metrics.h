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

#ifndef ANNOFLOW_EVAL_METRICS_H_
#define ANNOFLOW_EVAL_METRICS_H_

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "annoflow/core/jsonl.h"

namespace annoflow::eval {

struct Chunk {
  std::size_t sentence = 0;
  std::size_t begin = 0;  // token index
  std::size_t end = 0;    // token index, inclusive
  std::string type;
  // Set when the chunk was opened by an I- tag (repair mode).
  bool repaired = false;

  auto operator<=>(const Chunk &) const = default;
};

// Maximal B-X (I-X)* runs. An I-X that cannot continue the previous tag opens
// a new chunk and is flagged as repaired; unparseable labels act as O.
std::vector<Chunk> ChunkExtract(std::span<const std::string> labels,
                                std::size_t sentence = 0);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const Counts &) const = default;
};

enum class ScoreMode {
  kChunk,           // exact (sentence, begin, end, type) chunk match
  kTokenExcludingO  // per-token match over tokens where pred or gold is not O
};

struct EvalReport {
  ScoreMode mode = ScoreMode::kChunk;
  std::map<std::string, Counts> per_type;
  Counts overall;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  Json ToJson() const;
  // Aligned plain-text table, one row per type plus the overall row.
  std::string ToTable() const;
};

// Precision, recall and F1 with the 0/0 -> 0 convention.
double SafeRatio(std::size_t num, std::size_t den);
double F1Score(double precision, double recall);

// Micro-averaged scores pooled over all types. Errors: LengthMismatch.
EvalReport MicroF1(const std::vector<std::vector<std::string>> &predicted,
                   const std::vector<std::vector<std::string>> &gold,
                   ScoreMode mode = ScoreMode::kChunk);

}  // namespace annoflow::eval

#endif  // ANNOFLOW_EVAL_METRICS_H_
