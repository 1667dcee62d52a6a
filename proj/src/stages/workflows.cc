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

#include "annoflow/stages/workflows.h"

#include <map>

#include "annoflow/core/error.h"
#include "annoflow/parallel/executor.h"
#include "annoflow/stages/builtin_stages.h"

namespace annoflow::stages {

namespace {

void ThrowFirstRecordError(const Frame &frame) {
  for (const auto &record : frame.records) {
    if (record.error) {
      throw Error(ErrorCode::kInvalidArgument, "record '" + record.id + "': " + *record.error,
                  record.id);
    }
  }
}

std::string Join(const std::vector<std::string> &tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<StageSpec> RuleStageSpecs() {
  return {
      {"document_assembler", kDocumentAssembler, {kTextColumn}, "document", Json::object()},
      {"sentence_detector", kSentenceDetector, {"document"}, "sentence", Json::object()},
      {"tokenizer", kTokenizer, {"sentence"}, "token", Json::object()},
  };
}

FittedStage MakeFittedStage(StageSpec spec, AnnotationKind kind, AnnotatorPtr annotator) {
  if (auto params = annotator->ResolvedParams()) spec.params = *params;
  return FittedStage{std::move(spec), kind, std::move(annotator)};
}

std::vector<FittedStage> TextAndEmbeddingStages(const embeddings::EmbeddingTable &table) {
  std::vector<FittedStage> stages;
  for (StageSpec spec : RuleStageSpecs()) {
    const StageType &type = DefaultRegistry().Get(spec.type);
    AnnotatorPtr annotator = type.build(spec);
    stages.push_back(MakeFittedStage(std::move(spec), type.output_kind, std::move(annotator)));
  }
  stages.push_back(MakeFittedStage(
      {"embeddings", kWordEmbeddings, {"token"}, "embeddings", Json::object()},
      AnnotationKind::kWordEmbedding, MakeWordEmbeddings(table)));
  return stages;
}

NerTrainingRun TrainNerPipeline(const eval::ConllDataset &data,
                                const embeddings::EmbeddingTable &table,
                                const ner::NerConfig &config,
                                const ner::EpochCallback &on_epoch) {
  const Frame frame = eval::ConllToFrame(data, true);
  std::vector<FittedStage> stages = TextAndEmbeddingStages(table);
  const Frame prepared = FittedPipeline(stages, frame.schema).Transform(frame);
  ThrowFirstRecordError(prepared);

  const auto sentences = CollectNerSentences(prepared, "sentence", "token", "embeddings",
                                             eval::kLabelColumn);
  ner::TrainResult trained = ner::TrainNer(sentences, config, on_epoch);

  NerTrainingRun run;
  run.loss_trace = std::move(trained.loss_trace);
  run.sentences = sentences.size();
  run.tokens = data.token_count();
  run.coverage = embeddings::CoverageStats(table, prepared, "token");

  stages.push_back(MakeFittedStage({"ner", kNerTagger, {"sentence", "token", "embeddings"},
                                    "ner", Json::object()},
                                   AnnotationKind::kNamedEntity,
                                   MakeNerTagger(std::move(trained.model))));
  StageSpec converter{"ner_converter", kNerConverter, {"sentence", "ner"}, "ner_chunk",
                      Json::object()};
  const StageType &conv_type = DefaultRegistry().Get(kNerConverter);
  AnnotatorPtr conv = conv_type.build(converter);
  stages.push_back(MakeFittedStage(std::move(converter), conv_type.output_kind, std::move(conv)));

  run.pipeline = FittedPipeline(std::move(stages), {});
  return run;
}

Frame AssertionRecordsToFrame(const std::vector<assertion::AssertionRecord> &records) {
  Frame frame;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    if (r.chunk_begin > r.chunk_end || r.chunk_end >= r.text.size()) {
      throw Error(ErrorCode::kInvalidArgument, "chunk span outside the text",
                  "example " + std::to_string(i));
    }
    DocumentRecord record;
    record.id = "a" + std::to_string(i);
    record.text = r.text;
    const std::string chunk_text = r.text.substr(r.chunk_begin, r.chunk_end - r.chunk_begin + 1);
    record.columns["ner_chunk"] = {
        Annotation{AnnotationKind::kChunk, r.chunk_begin, r.chunk_end, chunk_text, {}, {}}};
    record.columns[kAssertionLabelColumn] = {
        Annotation{AnnotationKind::kAssertion, r.chunk_begin, r.chunk_end,
                   std::string(assertion::LabelName(r.label)), {}, {}}};
    frame.records.push_back(std::move(record));
  }
  frame.schema = {{"ner_chunk", AnnotationKind::kChunk},
                  {kAssertionLabelColumn, AnnotationKind::kAssertion}};
  return frame;
}

AssertionTrainingRun TrainAssertionPipeline(
    const std::vector<assertion::AssertionRecord> &records,
    const embeddings::EmbeddingTable &table, const assertion::AssertionConfig &config) {
  const Frame frame = AssertionRecordsToFrame(records);
  std::vector<FittedStage> stages = TextAndEmbeddingStages(table);
  const Frame prepared = FittedPipeline(stages, frame.schema).Transform(frame);
  ThrowFirstRecordError(prepared);

  const auto examples = CollectAssertionExamples(prepared, "sentence", "token", "embeddings",
                                                 "ner_chunk", kAssertionLabelColumn);
  assertion::AssertionTrainResult trained = assertion::TrainAssertion(examples, config);

  AssertionTrainingRun run;
  run.loss_trace = std::move(trained.loss_trace);
  run.warnings = std::move(trained.warnings);
  run.examples = examples.size();
  stages.push_back(MakeFittedStage(
      {"assertion", kAssertionClassifier, {"sentence", "token", "embeddings", "ner_chunk"},
       "assertion", Json::object()},
      AnnotationKind::kAssertion, MakeAssertionClassifier(std::move(trained.model))));
  run.pipeline = FittedPipeline(std::move(stages), {{"ner_chunk", AnnotationKind::kChunk}});
  return run;
}

EvaluationRun EvaluatePipeline(const FittedPipeline &pipeline, const eval::ConllDataset &data,
                               eval::ScoreMode mode, bool retokenize, int workers) {
  if (data.sentences.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation dataset has no sentences");
  }
  const FittedStage *tagger = nullptr;
  for (const auto &stage : pipeline.stages()) {
    if (stage.output_kind == AnnotationKind::kNamedEntity) tagger = &stage;
  }
  if (!tagger) {
    throw Error(ErrorCode::kInvalidArgument, "pipeline has no named_entity stage");
  }
  const std::string &token_column = tagger->spec.inputs.size() > 1 ? tagger->spec.inputs[1]
                                                                   : std::string("token");
  const std::string &ner_column = tagger->spec.output;

  Frame input;
  if (retokenize) {
    for (std::size_t i = 0; i < data.sentences.size(); ++i) {
      DocumentRecord record;
      record.id = "s" + std::to_string(i);
      record.text = Join(data.sentences[i].tokens);
      input.records.push_back(std::move(record));
    }
  } else {
    input = eval::ConllToFrame(data, false);
  }
  const Frame output = parallel::RunParallel(pipeline, input, workers);

  std::vector<std::vector<std::string>> predicted;
  std::vector<std::vector<std::string>> gold;
  EvaluationRun run;
  for (std::size_t i = 0; i < output.records.size(); ++i) {
    const DocumentRecord &record = output.records[i];
    const eval::ConllSentence &sentence = data.sentences[i];
    if (record.error) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sentence " + std::to_string(i) + " failed: " + *record.error, record.id);
    }
    const Column &tokens = record.column(token_column);
    std::vector<std::string> pipeline_tokens;
    for (const auto &t : tokens) pipeline_tokens.push_back(t.result);
    if (pipeline_tokens != sentence.tokens) {
      throw Error(ErrorCode::kAlignment,
                  "sentence " + std::to_string(i) + ": pipeline tokens [" +
                      Join(pipeline_tokens) + "] differ from file tokens [" +
                      Join(sentence.tokens) + "]",
                  record.id);
    }
    std::map<std::pair<std::size_t, std::size_t>, std::string> tags;
    for (const auto &a : record.column(ner_column)) tags[{a.begin, a.end}] = a.result;
    std::vector<std::string> labels;
    for (const auto &t : tokens) {
      auto it = tags.find({t.begin, t.end});
      if (it == tags.end()) {
        throw Error(ErrorCode::kAlignment,
                    "sentence " + std::to_string(i) + ": token '" + t.result + "' has no tag",
                    record.id);
      }
      labels.push_back(it->second);
    }
    predicted.push_back(std::move(labels));
    gold.push_back(sentence.labels);
    run.tokens += sentence.tokens.size();
  }
  run.sentences = data.sentences.size();
  run.report = eval::MicroF1(predicted, gold, mode);
  return run;
}

}  // namespace annoflow::stages
