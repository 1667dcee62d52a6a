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

#include "annoflow/eval/conll.h"

#include <fstream>
#include <istream>
#include <sstream>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"

namespace annoflow::eval {

std::size_t ConllDataset::token_count() const {
  std::size_t n = 0;
  for (const auto &s : sentences) n += s.tokens.size();
  return n;
}

namespace {

std::vector<std::string> Fields(const std::string &line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

// Rewrites IOB1 chunk openings to IOB2 in place; returns the count.
std::size_t ToIob2(std::vector<std::string> &labels) {
  std::size_t converted = 0;
  std::string_view prev;
  for (auto &label : labels) {
    if (!BioTransitionAllowed(prev, label)) {
      label[0] = 'B';
      ++converted;
    }
    prev = label;
  }
  return converted;
}

}  // namespace

ConllDataset ReadConll(std::istream &in, const std::string &name) {
  ConllDataset dataset;
  std::vector<std::string> seen_labels;
  ConllSentence current;
  std::size_t field_count = 0;

  const auto flush = [&] {
    if (current.tokens.empty()) return;
    dataset.iob1_conversions += ToIob2(current.labels);
    dataset.sentences.push_back(std::move(current));
    current = ConllSentence{};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = Fields(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields[0] == "-DOCSTART-") {
      flush();
      continue;
    }
    if (fields.size() < 2) {
      throw Error(ErrorCode::kRaggedLine, "expected a token and a label", name, line_no);
    }
    if (field_count == 0) field_count = fields.size();
    if (fields.size() != field_count) {
      throw Error(ErrorCode::kRaggedLine,
                  "expected " + std::to_string(field_count) + " fields, found " +
                      std::to_string(fields.size()),
                  name, line_no);
    }
    const std::string &label = fields.back();
    if (!ParseBio(label)) {
      throw Error(ErrorCode::kInvalidLabel, "label '" + label + "' is not O/B-X/I-X", name,
                  line_no);
    }
    current.tokens.push_back(fields.front());
    current.labels.push_back(label);
  }
  flush();

  for (const auto &s : dataset.sentences) {
    seen_labels.insert(seen_labels.end(), s.labels.begin(), s.labels.end());
  }
  dataset.inventory = CanonicalInventory(std::move(seen_labels));
  return dataset;
}

ConllDataset ReadConllFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open CoNLL file", path.string());
  return ReadConll(in, path.string());
}

ConllDataset MergeDatasets(const ConllDataset &first, const ConllDataset &second) {
  ConllDataset merged = first;
  merged.sentences.insert(merged.sentences.end(), second.sentences.begin(),
                          second.sentences.end());
  merged.iob1_conversions += second.iob1_conversions;
  std::vector<std::string> labels = first.inventory;
  labels.insert(labels.end(), second.inventory.begin(), second.inventory.end());
  merged.inventory = CanonicalInventory(std::move(labels));
  return merged;
}

Frame ConllToFrame(const ConllDataset &dataset, bool with_labels,
                   const std::string &id_prefix) {
  Frame frame;
  frame.records.reserve(dataset.sentences.size());
  for (std::size_t i = 0; i < dataset.sentences.size(); ++i) {
    const ConllSentence &sentence = dataset.sentences[i];
    DocumentRecord record;
    record.id = id_prefix + std::to_string(i);

    Column tokens;
    Column labels;
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      if (t > 0) record.text.push_back(' ');
      Annotation token;
      token.kind = AnnotationKind::kToken;
      token.begin = record.text.size();
      record.text += sentence.tokens[t];
      token.end = record.text.size() - 1;
      token.result = sentence.tokens[t];
      token.metadata["sentence"] = "0";
      if (with_labels) {
        Annotation label = token;
        label.kind = AnnotationKind::kNamedEntity;
        label.result = sentence.labels[t];
        labels.push_back(std::move(label));
      }
      tokens.push_back(std::move(token));
    }

    Annotation document;
    document.kind = AnnotationKind::kDocument;
    document.begin = 0;
    document.end = record.text.empty() ? 0 : record.text.size() - 1;
    document.result = record.text;
    Annotation sent = document;
    sent.kind = AnnotationKind::kSentence;
    sent.metadata["sentence"] = "0";

    record.columns["document"] = {document};
    record.columns["sentence"] = {sent};
    record.columns["token"] = std::move(tokens);
    if (with_labels) record.columns[kLabelColumn] = std::move(labels);
    frame.records.push_back(std::move(record));
  }
  frame.schema = {{"document", AnnotationKind::kDocument},
                  {"sentence", AnnotationKind::kSentence},
                  {"token", AnnotationKind::kToken}};
  if (with_labels) frame.schema[kLabelColumn] = AnnotationKind::kNamedEntity;
  return frame;
}

}  // namespace annoflow::eval
