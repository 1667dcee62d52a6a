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

#ifndef ANNOFLOW_PARALLEL_SYNTHETIC_H_
#define ANNOFLOW_PARALLEL_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "annoflow/core/frame.h"
#include "annoflow/embeddings/embedding_table.h"
#include "annoflow/eval/conll.h"

namespace annoflow::parallel {

// Seeded generator of clinical-style notes built from sentence templates.
struct CorpusParams {
  std::size_t docs = 1000;
  int min_sentences = 1;
  int max_sentences = 8;
  std::uint64_t seed = 42;
  // Adds abbreviations, decimals, non-ASCII letters, control characters,
  // irregular spacing and the occasional empty document.
  bool noise = false;

  void Validate() const;
};

// Records "doc-<i>" with only the text column set.
Frame SyntheticCorpus(const CorpusParams &params);

// Tokenized, BIO-labeled sentences from the same templates (entity types
// Disease, Symptom, Drug). Tokens match the default tokenizer.
eval::ConllDataset SyntheticLabeledSentences(std::size_t count, std::uint64_t seed);

// Every word the templates can produce, lowercased, sorted, unique.
std::vector<std::string> SyntheticVocabulary();

// Seeded random vectors in [-1, 1) for SyntheticVocabulary().
embeddings::EmbeddingTable SyntheticEmbeddings(std::size_t dimension, std::uint64_t seed);

}  // namespace annoflow::parallel

#endif  // ANNOFLOW_PARALLEL_SYNTHETIC_H_
