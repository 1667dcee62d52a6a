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

#include "annoflow/stages/builtin_stages.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <utility>

#include "annoflow/core/error.h"
#include "annoflow/embeddings/embedding_table.h"
#include "annoflow/eval/metrics.h"
#include "annoflow/text/annotators.h"

namespace annoflow {

namespace stages {

namespace {

using SpanKey = std::pair<std::size_t, std::size_t>;
using SpanIndex = std::map<SpanKey, const Annotation *>;

SpanIndex IndexBySpan(const Column &column) {
  SpanIndex index;
  for (const auto &a : column) index.emplace(SpanKey{a.begin, a.end}, &a);
  return index;
}

std::string FormatDouble(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Tokens and their vectors for one sentence.
ner::SentenceInput SentenceVectors(const std::vector<const Annotation *> &tokens,
                                   const SpanIndex &vectors, const DocumentRecord &record) {
  ner::SentenceInput input;
  for (const Annotation *tok : tokens) {
    auto it = vectors.find({tok->begin, tok->end});
    if (it == vectors.end() || !it->second->vector) {
      throw Error(ErrorCode::kAlignment,
                  "token '" + tok->result + "' at " + std::to_string(tok->begin) +
                      " has no word vector",
                  record.id);
    }
    input.tokens.push_back(tok->result);
    input.vectors.push_back(*it->second->vector);
  }
  return input;
}

// Locates the sentence containing `chunk` and the chunk's token range in it.
struct ChunkPlacement {
  const Annotation *sentence = nullptr;
  std::vector<const Annotation *> tokens;
  std::size_t begin = 0;
  std::size_t end = 0;
};

ChunkPlacement PlaceChunk(const Annotation &chunk, const Column &sentences,
                          const Column &tokens) {
  ChunkPlacement out;
  for (const auto &s : sentences) {
    if (s.begin <= chunk.begin && chunk.end <= s.end) {
      out.sentence = &s;
      break;
    }
  }
  if (!out.sentence) {
    throw Error(ErrorCode::kInvalidArgument,
                "chunk '" + chunk.result + "' is not inside a single sentence");
  }
  out.tokens = AnnotationsWithin(tokens, *out.sentence);
  bool found = false;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    const Annotation *t = out.tokens[i];
    if (t->begin >= chunk.begin && t->end <= chunk.end) {
      if (!found) out.begin = i;
      found = true;
      out.end = i;
    }
  }
  if (!found || out.tokens[out.begin]->begin != chunk.begin ||
      out.tokens[out.end]->end != chunk.end) {
    throw Error(ErrorCode::kAlignment,
                "chunk '" + chunk.result + "' does not align with token boundaries");
  }
  return out;
}

// ---- rule-based stages -----------------------------------------------------

class DocumentAssemblerStage : public Annotator {
 public:
  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    record.columns[spec.output] = {text::AssembleDocument(record.text)};
  }
  std::optional<Json> ResolvedParams() const override { return Json::object(); }
};

class SentenceDetectorStage : public Annotator {
 public:
  explicit SentenceDetectorStage(text::SentenceRules rules) : rules_(std::move(rules)) {}
  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    Column out;
    for (const auto &doc : record.column(spec.inputs[0])) {
      if (doc.metadata.count("empty")) continue;
      auto sentences = text::DetectSentences(doc, rules_);
      out.insert(out.end(), sentences.begin(), sentences.end());
    }
    record.columns[spec.output] = std::move(out);
  }
  std::optional<Json> ResolvedParams() const override { return rules_.ToJson(); }

 private:
  text::SentenceRules rules_;
};

class TokenizerStage : public Annotator {
 public:
  explicit TokenizerStage(text::TokenRules rules) : rules_(std::move(rules)) {}
  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    Column out;
    for (const auto &sentence : record.column(spec.inputs[0])) {
      auto tokens = text::Tokenize(sentence, rules_);
      out.insert(out.end(), tokens.begin(), tokens.end());
    }
    record.columns[spec.output] = std::move(out);
  }
  std::optional<Json> ResolvedParams() const override { return rules_.ToJson(); }

 private:
  text::TokenRules rules_;
};

class NormalizerStage : public Annotator {
 public:
  explicit NormalizerStage(text::NormalizerRules rules) : rules_(rules) {}
  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    record.columns[spec.output] = text::Normalize(record.column(spec.inputs[0]), rules_);
  }
  std::optional<Json> ResolvedParams() const override { return rules_.ToJson(); }

 private:
  text::NormalizerRules rules_;
};

// ---- embeddings ------------------------------------------------------------

class WordEmbeddingsStage : public Annotator {
 public:
  explicit WordEmbeddingsStage(embeddings::EmbeddingTable table) : table_(std::move(table)) {}

  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    Column out;
    for (const auto &tok : record.column(spec.inputs[0])) {
      const auto hit = table_.Lookup(tok.result);
      Annotation a{AnnotationKind::kWordEmbedding, tok.begin, tok.end, tok.result, {}, {}};
      a.metadata["found"] = hit.found ? "true" : "false";
      if (auto it = tok.metadata.find("sentence"); it != tok.metadata.end()) {
        a.metadata["sentence"] = it->second;
      }
      a.vector.emplace(hit.vector.begin(), hit.vector.end());
      out.push_back(std::move(a));
    }
    record.columns[spec.output] = std::move(out);
  }
  std::vector<std::uint8_t> SaveBlob() const override { return table_.Serialize(); }
  std::optional<Json> ResolvedParams() const override {
    return Json{{"case_policy", std::string(embeddings::CasePolicyName(table_.case_policy()))},
                {"dimension", table_.dimension()}};
  }

 private:
  embeddings::EmbeddingTable table_;
};

embeddings::CasePolicy PolicyFrom(const Json &params) {
  return embeddings::ParseCasePolicy(
      params.value("case_policy", std::string("exact_then_lowercase")));
}

// ---- NER -------------------------------------------------------------------

class NerTaggerStage : public Annotator {
 public:
  explicit NerTaggerStage(ner::NerModel model) : model_(std::move(model)) {}

  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    const Column &sentences = record.column(spec.inputs[0]);
    const Column &tokens = record.column(spec.inputs[1]);
    const SpanIndex vectors = IndexBySpan(record.column(spec.inputs[2]));
    Column out;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
      const auto sentence_tokens = AnnotationsWithin(tokens, sentences[si]);
      if (sentence_tokens.empty()) continue;
      const ner::SentenceInput input = SentenceVectors(sentence_tokens, vectors, record);
      const auto labels = model_.Predict(input);
      for (std::size_t t = 0; t < labels.size(); ++t) {
        const Annotation *tok = sentence_tokens[t];
        Annotation a{AnnotationKind::kNamedEntity, tok->begin, tok->end, labels[t], {}, {}};
        a.metadata["sentence"] = std::to_string(si);
        a.metadata["word"] = tok->result;
        out.push_back(std::move(a));
      }
    }
    record.columns[spec.output] = std::move(out);
  }
  std::vector<std::uint8_t> SaveBlob() const override { return model_.Serialize(); }
  // Descriptive only; the blob carries the full config, including the real
  // valued hyperparameters.
  std::optional<Json> ResolvedParams() const override {
    const ner::NerConfig &c = model_.config();
    return Json{{"labels", model_.labels()},   {"char_dim", c.char_dim},
                {"conv_width", c.conv_width},  {"filters", c.filters},
                {"hidden", c.hidden},          {"max_word_length", c.max_word_length},
                {"word_dim", model_.word_dim()}, {"seed", c.seed}};
  }

 private:
  ner::NerModel model_;
};

class NerConverterStage : public Annotator {
 public:
  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    const Column &sentences = record.column(spec.inputs[0]);
    const Column &entities = record.column(spec.inputs[1]);
    Column out;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
      const auto tags = AnnotationsWithin(entities, sentences[si]);
      std::vector<std::string> labels;
      labels.reserve(tags.size());
      for (const Annotation *a : tags) labels.push_back(a->result);
      for (const eval::Chunk &c : eval::ChunkExtract(labels, si)) {
        const std::size_t begin = tags[c.begin]->begin;
        const std::size_t end = tags[c.end]->end;
        Annotation a{AnnotationKind::kChunk, begin, end,
                     record.text.substr(begin, end - begin + 1), {}, {}};
        a.metadata["entity"] = c.type;
        a.metadata["sentence"] = std::to_string(si);
        a.metadata["token_begin"] = std::to_string(c.begin);
        a.metadata["token_end"] = std::to_string(c.end);
        if (c.repaired) a.metadata["repaired"] = "true";
        out.push_back(std::move(a));
      }
    }
    record.columns[spec.output] = std::move(out);
  }
  std::optional<Json> ResolvedParams() const override { return Json::object(); }
};

// ---- assertion -------------------------------------------------------------

class AssertionStage : public Annotator {
 public:
  explicit AssertionStage(assertion::AssertionModel model) : model_(std::move(model)) {}

  void Annotate(DocumentRecord &record, const StageSpec &spec) const override {
    const Column &sentences = record.column(spec.inputs[0]);
    const Column &tokens = record.column(spec.inputs[1]);
    const SpanIndex vectors = IndexBySpan(record.column(spec.inputs[2]));
    Column out;
    for (const auto &chunk : record.column(spec.inputs[3])) {
      const ChunkPlacement place = PlaceChunk(chunk, sentences, tokens);
      const ner::SentenceInput input = SentenceVectors(place.tokens, vectors, record);
      const auto prediction = model_.Predict(input.vectors, place.begin, place.end);
      Annotation a{AnnotationKind::kAssertion, chunk.begin, chunk.end,
                   std::string(assertion::LabelName(prediction.label)), {}, {}};
      a.metadata["chunk"] = chunk.result;
      if (auto it = chunk.metadata.find("entity"); it != chunk.metadata.end()) {
        a.metadata["entity"] = it->second;
      }
      for (std::size_t c = 0; c < assertion::kLabelCount; ++c) {
        a.metadata["p_" + std::string(assertion::LabelName(assertion::kAllLabels[c]))] =
            FormatDouble(prediction.probabilities[c]);
      }
      out.push_back(std::move(a));
    }
    record.columns[spec.output] = std::move(out);
  }
  std::vector<std::uint8_t> SaveBlob() const override { return model_.Serialize(); }
  std::optional<Json> ResolvedParams() const override {
    return Json{{"window", model_.window()}, {"dimension", model_.dimension()}};
  }

 private:
  assertion::AssertionModel model_;
};

}  // namespace

std::vector<ner::LabeledSentence> CollectNerSentences(const Frame &frame,
                                                      const std::string &sentence_column,
                                                      const std::string &token_column,
                                                      const std::string &vector_column,
                                                      const std::string &label_column) {
  std::vector<ner::LabeledSentence> out;
  for (const auto &record : frame.records) {
    if (record.error) continue;
    const Column &sentences = record.column(sentence_column);
    const Column &tokens = record.column(token_column);
    const SpanIndex vectors = IndexBySpan(record.column(vector_column));
    SpanIndex labels;
    if (!label_column.empty()) labels = IndexBySpan(record.column(label_column));
    for (const auto &sentence : sentences) {
      const auto sentence_tokens = AnnotationsWithin(tokens, sentence);
      if (sentence_tokens.empty()) continue;
      ner::LabeledSentence s{SentenceVectors(sentence_tokens, vectors, record), {}};
      if (!label_column.empty()) {
        for (const Annotation *tok : sentence_tokens) {
          auto it = labels.find({tok->begin, tok->end});
          if (it == labels.end()) {
            throw Error(ErrorCode::kAlignment,
                        "token '" + tok->result + "' at " + std::to_string(tok->begin) +
                            " has no gold label",
                        record.id);
          }
          s.labels.push_back(it->second->result);
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<assertion::AssertionExample> CollectAssertionExamples(
    const Frame &frame, const std::string &sentence_column, const std::string &token_column,
    const std::string &vector_column, const std::string &chunk_column,
    const std::string &label_column) {
  std::vector<assertion::AssertionExample> out;
  for (const auto &record : frame.records) {
    if (record.error) continue;
    const Column &sentences = record.column(sentence_column);
    const Column &tokens = record.column(token_column);
    const SpanIndex vectors = IndexBySpan(record.column(vector_column));
    const SpanIndex labels = IndexBySpan(record.column(label_column));
    const Column &chunks = record.column(chunk_column);
    for (const auto &[span, label] : labels) {
      const bool matched = std::any_of(chunks.begin(), chunks.end(), [&](const Annotation &c) {
        return c.begin == span.first && c.end == span.second;
      });
      if (!matched) {
        throw Error(ErrorCode::kAlignment,
                    "gold assertion '" + label->result + "' has no matching chunk", record.id);
      }
    }
    for (const auto &chunk : chunks) {
      auto it = labels.find({chunk.begin, chunk.end});
      if (it == labels.end()) continue;
      const ChunkPlacement place = PlaceChunk(chunk, sentences, tokens);
      ner::SentenceInput input = SentenceVectors(place.tokens, vectors, record);
      out.push_back({std::move(input.vectors), place.begin, place.end,
                     assertion::ParseLabel(it->second->result)});
    }
  }
  return out;
}

AnnotatorPtr MakeWordEmbeddings(embeddings::EmbeddingTable table) {
  return std::make_shared<WordEmbeddingsStage>(std::move(table));
}

AnnotatorPtr MakeNerTagger(ner::NerModel model) {
  return std::make_shared<NerTaggerStage>(std::move(model));
}

AnnotatorPtr MakeAssertionClassifier(assertion::AssertionModel model) {
  return std::make_shared<AssertionStage>(std::move(model));
}

void RegisterBuiltinStages(StageRegistry &registry) {
  using K = AnnotationKind;

  StageType doc;
  doc.name = kDocumentAssembler;
  doc.input_kinds = {std::nullopt};
  doc.output_kind = K::kDocument;
  doc.default_inputs = {kTextColumn};
  doc.default_output = "document";
  doc.build = [](const StageSpec &) { return std::make_shared<DocumentAssemblerStage>(); };
  registry.Register(doc);

  StageType sent;
  sent.name = kSentenceDetector;
  sent.input_kinds = {K::kDocument};
  sent.output_kind = K::kSentence;
  sent.default_inputs = {"document"};
  sent.default_output = "sentence";
  sent.build = [](const StageSpec &spec) {
    return std::make_shared<SentenceDetectorStage>(text::SentenceRules::FromJson(spec.params));
  };
  registry.Register(sent);

  StageType tok;
  tok.name = kTokenizer;
  tok.input_kinds = {K::kSentence};
  tok.output_kind = K::kToken;
  tok.default_inputs = {"sentence"};
  tok.default_output = "token";
  tok.build = [](const StageSpec &spec) {
    return std::make_shared<TokenizerStage>(text::TokenRules::FromJson(spec.params));
  };
  registry.Register(tok);

  StageType norm;
  norm.name = kNormalizer;
  norm.input_kinds = {K::kToken};
  norm.output_kind = K::kNormalizedToken;
  norm.default_inputs = {"token"};
  norm.default_output = "normalized";
  norm.build = [](const StageSpec &spec) {
    return std::make_shared<NormalizerStage>(text::NormalizerRules::FromJson(spec.params));
  };
  registry.Register(norm);

  StageType emb;
  emb.name = kWordEmbeddings;
  emb.input_kinds = {K::kToken};
  emb.output_kind = K::kWordEmbedding;
  emb.default_inputs = {"token"};
  emb.default_output = "embeddings";
  emb.has_blob = true;
  emb.build = [](const StageSpec &spec) {
    if (!spec.params.contains("path")) {
      throw Error(ErrorCode::kConfig, "WordEmbeddings needs a \"path\" param", spec.id);
    }
    std::optional<std::size_t> dim;
    if (spec.params.contains("dimension")) dim = spec.params["dimension"].get<std::size_t>();
    return std::make_shared<WordEmbeddingsStage>(embeddings::LoadGlove(
        spec.params["path"].get<std::string>(), dim, PolicyFrom(spec.params)));
  };
  emb.load = [](const StageSpec &spec, std::span<const std::uint8_t> blob) {
    return std::make_shared<WordEmbeddingsStage>(
        embeddings::EmbeddingTable::Deserialize(blob, PolicyFrom(spec.params)));
  };
  registry.Register(emb);

  const std::vector<std::optional<K>> ner_inputs = {K::kSentence, K::kToken,
                                                    K::kWordEmbedding};
  const std::vector<std::string> ner_defaults = {"sentence", "token", "embeddings"};

  StageType ner_est;
  ner_est.name = kNerEstimator;
  ner_est.input_kinds = ner_inputs;
  ner_est.output_kind = K::kNamedEntity;
  ner_est.default_inputs = ner_defaults;
  ner_est.default_output = "ner";
  ner_est.estimator = true;
  ner_est.training_columns = {"label"};
  ner_est.fitted_type = kNerTagger;
  ner_est.has_blob = true;
  ner_est.fit = [](const StageSpec &spec, const Frame &frame) {
    const ner::NerConfig config = ner::NerConfig::FromJson(spec.params);
    const auto data = CollectNerSentences(frame, spec.inputs[0], spec.inputs[1],
                                          spec.inputs[2], "label");
    return std::make_shared<NerTaggerStage>(ner::TrainNer(data, config).model);
  };
  registry.Register(ner_est);

  StageType tagger;
  tagger.name = kNerTagger;
  tagger.input_kinds = ner_inputs;
  tagger.output_kind = K::kNamedEntity;
  tagger.default_inputs = ner_defaults;
  tagger.default_output = "ner";
  tagger.has_blob = true;
  tagger.build = [](const StageSpec &spec) {
    if (!spec.params.contains("model_dir")) {
      throw Error(ErrorCode::kConfig,
                  "NerTagger needs trained parameters (\"model_dir\" param or a saved pipeline)",
                  spec.id);
    }
    return std::make_shared<NerTaggerStage>(
        ner::NerModel::Load(spec.params["model_dir"].get<std::string>()));
  };
  tagger.load = [](const StageSpec &, std::span<const std::uint8_t> blob) {
    return std::make_shared<NerTaggerStage>(ner::NerModel::Deserialize(blob));
  };
  registry.Register(tagger);

  StageType conv;
  conv.name = kNerConverter;
  conv.input_kinds = {K::kSentence, K::kNamedEntity};
  conv.output_kind = K::kChunk;
  conv.default_inputs = {"sentence", "ner"};
  conv.default_output = "ner_chunk";
  conv.build = [](const StageSpec &) { return std::make_shared<NerConverterStage>(); };
  registry.Register(conv);

  const std::vector<std::optional<K>> asr_inputs = {K::kSentence, K::kToken,
                                                    K::kWordEmbedding, K::kChunk};
  const std::vector<std::string> asr_defaults = {"sentence", "token", "embeddings",
                                                 "ner_chunk"};

  StageType asr_est;
  asr_est.name = kAssertionEstimator;
  asr_est.input_kinds = asr_inputs;
  asr_est.output_kind = K::kAssertion;
  asr_est.default_inputs = asr_defaults;
  asr_est.default_output = "assertion";
  asr_est.estimator = true;
  asr_est.training_columns = {kAssertionLabelColumn};
  asr_est.fitted_type = kAssertionClassifier;
  asr_est.has_blob = true;
  asr_est.fit = [](const StageSpec &spec, const Frame &frame) {
    const auto config = assertion::AssertionConfig::FromJson(spec.params);
    const auto data = CollectAssertionExamples(frame, spec.inputs[0], spec.inputs[1],
                                               spec.inputs[2], spec.inputs[3],
                                               kAssertionLabelColumn);
    return std::make_shared<AssertionStage>(assertion::TrainAssertion(data, config).model);
  };
  registry.Register(asr_est);

  StageType asr;
  asr.name = kAssertionClassifier;
  asr.input_kinds = asr_inputs;
  asr.output_kind = K::kAssertion;
  asr.default_inputs = asr_defaults;
  asr.default_output = "assertion";
  asr.has_blob = true;
  asr.build = [](const StageSpec &spec) -> AnnotatorPtr {
    throw Error(ErrorCode::kConfig, "AssertionClassifier needs trained parameters", spec.id);
  };
  asr.load = [](const StageSpec &, std::span<const std::uint8_t> blob) {
    return std::make_shared<AssertionStage>(assertion::AssertionModel::Deserialize(blob));
  };
  registry.Register(asr);
}

}  // namespace stages

const StageRegistry &DefaultRegistry() {
  static const StageRegistry registry = [] {
    StageRegistry r;
    stages::RegisterBuiltinStages(r);
    return r;
  }();
  return registry;
}

}  // namespace annoflow
