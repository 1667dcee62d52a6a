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

#ifndef ANNOFLOW_STAGES_WORKFLOWS_H_
#define ANNOFLOW_STAGES_WORKFLOWS_H_

#include <optional>
#include <string>
#include <vector>

#include "annoflow/assertion/assertion.h"
#include "annoflow/core/pipeline.h"
#include "annoflow/embeddings/embedding_table.h"
#include "annoflow/eval/conll.h"
#include "annoflow/eval/metrics.h"
#include "annoflow/ner/trainer.h"

namespace annoflow::stages {

// Specs of the rule stages DocumentAssembler, SentenceDetector, Tokenizer
// with default params.
std::vector<StageSpec> RuleStageSpecs();

// DocumentAssembler, SentenceDetector, Tokenizer, then WordEmbeddings over
// `table`.
std::vector<FittedStage> TextAndEmbeddingStages(const embeddings::EmbeddingTable &table);

// Wraps an annotator as a fitted stage, applying its resolved params.
FittedStage MakeFittedStage(StageSpec spec, AnnotationKind kind, AnnotatorPtr annotator);

struct NerTrainingRun {
  FittedPipeline pipeline;  // text stages, embeddings, NerTagger, NerConverter
  std::vector<double> loss_trace;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  embeddings::CoverageReport coverage;
};

// Trains on the file tokenization of `data`.
NerTrainingRun TrainNerPipeline(const eval::ConllDataset &data,
                                const embeddings::EmbeddingTable &table,
                                const ner::NerConfig &config,
                                const ner::EpochCallback &on_epoch = {});

// One record per example: the text plus a seeded "ner_chunk" column and an
// "assertion_label" column holding the gold label over the chunk span.
Frame AssertionRecordsToFrame(const std::vector<assertion::AssertionRecord> &records);

struct AssertionTrainingRun {
  FittedPipeline pipeline;  // text stages, embeddings, AssertionClassifier
  std::vector<double> loss_trace;
  std::vector<std::string> warnings;
  std::size_t examples = 0;
};

// Chunks must align with the default tokenizer's token boundaries.
AssertionTrainingRun TrainAssertionPipeline(
    const std::vector<assertion::AssertionRecord> &records,
    const embeddings::EmbeddingTable &table, const assertion::AssertionConfig &config);

struct EvaluationRun {
  eval::EvalReport report;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
};

// Tags every sentence of `data` with `pipeline` and scores the tags against
// the gold labels. By default the file tokens are fed to the pipeline as
// seeded columns. With `retokenize`, the pipeline tokenizes the space-joined
// text itself and its tokens must equal the file tokens exactly.
//
// Errors: InvalidArgument (empty dataset or no named_entity stage),
// Alignment (names the first offending sentence), or the first record error.
EvaluationRun EvaluatePipeline(const FittedPipeline &pipeline, const eval::ConllDataset &data,
                               eval::ScoreMode mode = eval::ScoreMode::kChunk,
                               bool retokenize = false, int workers = 1);

}  // namespace annoflow::stages

#endif  // ANNOFLOW_STAGES_WORKFLOWS_H_
