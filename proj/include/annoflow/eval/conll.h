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

#ifndef ANNOFLOW_EVAL_CONLL_H_
#define ANNOFLOW_EVAL_CONLL_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "annoflow/core/frame.h"

namespace annoflow::eval {

struct ConllSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

struct ConllDataset {
  std::vector<ConllSentence> sentences;
  // "O" first, then sorted.
  std::vector<std::string> inventory;
  // Load report: labels rewritten from IOB1 to IOB2 (an I-X opening a chunk
  // becomes B-X).
  std::size_t iob1_conversions = 0;

  std::size_t token_count() const;
};

// Blank-line separated sentences, one "token ... label" line per token; the
// label is the last whitespace-separated field. -DOCSTART- lines are skipped.
// Errors: InvalidLabel(line), RaggedLine(line).
ConllDataset ReadConll(std::istream &in, const std::string &name = "<stream>");
ConllDataset ReadConllFile(const std::filesystem::path &path);

// Train+dev merging: concatenation with a recomputed inventory.
ConllDataset MergeDatasets(const ConllDataset &first, const ConllDataset &second);

inline constexpr const char kLabelColumn[] = "label";

// One record per sentence with document, sentence and token columns seeded
// from the file tokenization (tokens joined by single spaces). With
// `with_labels`, a "label" column of named_entity annotations carries the
// gold tags aligned to the tokens.
Frame ConllToFrame(const ConllDataset &dataset, bool with_labels,
                   const std::string &id_prefix = "s");

}  // namespace annoflow::eval

#endif  // ANNOFLOW_EVAL_CONLL_H_
