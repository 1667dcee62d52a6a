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

#ifndef ANNOFLOW_STAGES_BUILTIN_STAGES_H_
#define ANNOFLOW_STAGES_BUILTIN_STAGES_H_

#include <vector>

#include "annoflow/assertion/assertion.h"
#include "annoflow/core/stage.h"
#include "annoflow/embeddings/embedding_table.h"
#include "annoflow/ner/trainer.h"

namespace annoflow::stages {

inline constexpr const char kDocumentAssembler[] = "DocumentAssembler";
inline constexpr const char kSentenceDetector[] = "SentenceDetector";
inline constexpr const char kTokenizer[] = "Tokenizer";
inline constexpr const char kNormalizer[] = "Normalizer";
inline constexpr const char kWordEmbeddings[] = "WordEmbeddings";
inline constexpr const char kNerEstimator[] = "NerEstimator";
inline constexpr const char kNerTagger[] = "NerTagger";
inline constexpr const char kNerConverter[] = "NerConverter";
inline constexpr const char kAssertionEstimator[] = "AssertionEstimator";
inline constexpr const char kAssertionClassifier[] = "AssertionClassifier";

// Column holding gold assertion labels (kind assertion, one per chunk span)
// for AssertionEstimator.
inline constexpr const char kAssertionLabelColumn[] = "assertion_label";

void RegisterBuiltinStages(StageRegistry &registry);

// Fitted-stage annotators for models trained outside PipelineFit.
AnnotatorPtr MakeWordEmbeddings(embeddings::EmbeddingTable table);
AnnotatorPtr MakeNerTagger(ner::NerModel model);
AnnotatorPtr MakeAssertionClassifier(assertion::AssertionModel model);

// Tokens, vectors and (when `label_column` is non-empty) gold labels of every
// sentence, in record order. Records carrying an error are skipped.
// Throws Error(kAlignment) when a token has no vector or no label.
std::vector<ner::LabeledSentence> CollectNerSentences(const Frame &frame,
                                                      const std::string &sentence_column,
                                                      const std::string &token_column,
                                                      const std::string &vector_column,
                                                      const std::string &label_column);

// One example per labeled chunk. Chunks without a gold label are skipped.
std::vector<assertion::AssertionExample> CollectAssertionExamples(
    const Frame &frame, const std::string &sentence_column, const std::string &token_column,
    const std::string &vector_column, const std::string &chunk_column,
    const std::string &label_column);

}  // namespace annoflow::stages

#endif  // ANNOFLOW_STAGES_BUILTIN_STAGES_H_
