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

#ifndef ANNOFLOW_TEXT_ANNOTATORS_H_
#define ANNOFLOW_TEXT_ANNOTATORS_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annoflow/core/annotation.h"
#include "annoflow/core/jsonl.h"

namespace annoflow::text {

// Abbreviation list shipped in data/abbreviations.txt.
const std::vector<std::string> &DefaultAbbreviations();

// One entry per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> ReadListFile(const std::filesystem::path &path);

struct SentenceRules {
  std::string boundaries = ".?!";
  std::vector<std::string> abbreviations = DefaultAbbreviations();
  bool decimal_guard = true;

  // Entries must be non-empty, unique and end in '.'.
  void Validate() const;

  // Keys: boundaries, abbreviations, abbreviations_file, decimal_guard.
  static SentenceRules FromJson(const Json &params);
  Json ToJson() const;
};

struct TokenRules {
  // Characters treated as word characters besides letters and digits.
  std::string extra_word_chars;
  // When false, runs of non-word characters form one token.
  bool split_punctuation = true;
  // Strings emitted whole, e.g. hyphenated clinical terms.
  std::vector<std::string> exceptions;

  // Exception entries must be non-empty and contain no whitespace.
  void Validate() const;

  // Keys: extra_word_chars, split_punctuation, exceptions, exceptions_file.
  static TokenRules FromJson(const Json &params);
  Json ToJson() const;
};

enum class KeepClass { kAlnum, kAlpha };

struct NormalizerRules {
  KeepClass keep = KeepClass::kAlnum;
  std::string extra_keep;
  bool lowercase = true;

  // Keys: keep ("alnum" | "alpha"), extra_keep, lowercase.
  static NormalizerRules FromJson(const Json &params);
  Json ToJson() const;
};

// Whole-text document annotation. Control characters are replaced by spaces
// in the result, which keeps every offset valid. Empty text yields (0, 0)
// with metadata empty=true.
Annotation AssembleDocument(std::string_view text);

std::vector<Annotation> DetectSentences(const Annotation &document,
                                        const SentenceRules &rules);

// Offsets are absolute in the document. Token metadata carries the sentence
// index when the sentence has one.
std::vector<Annotation> Tokenize(const Annotation &sentence, const TokenRules &rules);

std::vector<Annotation> Normalize(std::span<const Annotation> tokens,
                                  const NormalizerRules &rules);

}  // namespace annoflow::text

#endif  // ANNOFLOW_TEXT_ANNOTATORS_H_
