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

#include "annoflow/text/annotators.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "annoflow/core/error.h"
#include "annoflow/text/utf8.h"

namespace annoflow::text {

namespace {

#include "default_abbreviations.inc"

std::vector<std::string> ParseList(std::istream &in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

bool ContainsCodePoint(std::string_view chars, char32_t cp) {
  if (chars.empty()) return false;
  std::string encoded;
  AppendUtf8(encoded, cp);
  return chars.find(encoded) != std::string_view::npos;
}

std::string Slice(const std::string &s, std::size_t begin, std::size_t end) {
  return s.substr(begin, end - begin + 1);
}

}  // namespace

const std::vector<std::string> &DefaultAbbreviations() {
  static const std::vector<std::string> list = [] {
    std::istringstream in{std::string(kDefaultAbbreviations)};
    return ParseList(in);
  }();
  return list;
}

std::vector<std::string> ReadListFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open list file", path.string());
  return ParseList(in);
}

void SentenceRules::Validate() const {
  std::set<std::string> seen;
  for (const auto &entry : abbreviations) {
    if (entry.empty() || entry.back() != '.') {
      throw Error(ErrorCode::kConfig, "abbreviation must end in '.'", entry);
    }
    if (!seen.insert(entry).second) {
      throw Error(ErrorCode::kConfig, "duplicate abbreviation", entry);
    }
  }
}

SentenceRules SentenceRules::FromJson(const Json &params) {
  SentenceRules rules;
  rules.boundaries = params.value("boundaries", rules.boundaries);
  rules.decimal_guard = params.value("decimal_guard", rules.decimal_guard);
  if (params.contains("abbreviations")) {
    rules.abbreviations = params["abbreviations"].get<std::vector<std::string>>();
  } else if (params.contains("abbreviations_file")) {
    rules.abbreviations = ReadListFile(params["abbreviations_file"].get<std::string>());
  }
  rules.Validate();
  return rules;
}

Json SentenceRules::ToJson() const {
  return Json{{"boundaries", boundaries},
              {"abbreviations", abbreviations},
              {"decimal_guard", decimal_guard}};
}

void TokenRules::Validate() const {
  for (const auto &entry : exceptions) {
    if (entry.empty()) throw Error(ErrorCode::kConfig, "empty tokenizer exception");
    for (const char32_t cp : Decode(entry)) {
      if (IsSpace(cp)) {
        throw Error(ErrorCode::kConfig, "tokenizer exception contains whitespace", entry);
      }
    }
  }
}

TokenRules TokenRules::FromJson(const Json &params) {
  TokenRules rules;
  rules.extra_word_chars = params.value("extra_word_chars", rules.extra_word_chars);
  rules.split_punctuation = params.value("split_punctuation", rules.split_punctuation);
  if (params.contains("exceptions")) {
    rules.exceptions = params["exceptions"].get<std::vector<std::string>>();
  } else if (params.contains("exceptions_file")) {
    rules.exceptions = ReadListFile(params["exceptions_file"].get<std::string>());
  }
  rules.Validate();
  return rules;
}

Json TokenRules::ToJson() const {
  return Json{{"extra_word_chars", extra_word_chars},
              {"split_punctuation", split_punctuation},
              {"exceptions", exceptions}};
}

NormalizerRules NormalizerRules::FromJson(const Json &params) {
  NormalizerRules rules;
  const std::string keep = params.value("keep", std::string("alnum"));
  if (keep == "alnum") {
    rules.keep = KeepClass::kAlnum;
  } else if (keep == "alpha") {
    rules.keep = KeepClass::kAlpha;
  } else {
    throw Error(ErrorCode::kConfig, "keep must be \"alnum\" or \"alpha\"", keep);
  }
  rules.extra_keep = params.value("extra_keep", rules.extra_keep);
  rules.lowercase = params.value("lowercase", rules.lowercase);
  return rules;
}

Json NormalizerRules::ToJson() const {
  return Json{{"keep", keep == KeepClass::kAlnum ? "alnum" : "alpha"},
              {"extra_keep", extra_keep},
              {"lowercase", lowercase}};
}

Annotation AssembleDocument(std::string_view text) {
  Annotation doc;
  doc.kind = AnnotationKind::kDocument;
  doc.begin = 0;
  if (text.empty()) {
    doc.end = 0;
    doc.metadata["empty"] = "true";
    return doc;
  }
  doc.end = text.size() - 1;
  doc.result.assign(text);
  for (char &c : doc.result) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7F) c = ' ';
  }
  return doc;
}

std::vector<Annotation> DetectSentences(const Annotation &document,
                                        const SentenceRules &rules) {
  std::vector<Annotation> sentences;
  if (document.metadata.count("empty")) return sentences;
  const std::string &s = document.result;
  const std::size_t n = s.size();

  const auto is_abbreviation = [&](std::size_t start, std::size_t pos) {
    std::size_t word_start = pos;
    while (word_start > start && s[word_start - 1] != ' ') {
      --word_start;
    }
    while (word_start < pos && std::string_view("([{\"'").find(s[word_start]) !=
                                   std::string_view::npos) {
      ++word_start;
    }
    const std::string_view word(s.data() + word_start, pos - word_start + 1);
    return std::find(rules.abbreviations.begin(), rules.abbreviations.end(), word) !=
           rules.abbreviations.end();
  };
  const auto emit = [&](std::size_t begin, std::size_t end) {
    Annotation a;
    a.kind = AnnotationKind::kSentence;
    a.begin = document.begin + begin;
    a.end = document.begin + end;
    a.result = Slice(s, begin, end);
    a.metadata["sentence"] = std::to_string(sentences.size());
    sentences.push_back(std::move(a));
  };

  constexpr std::size_t kNone = std::string::npos;
  std::size_t start = kNone;
  std::size_t last_content = 0;
  for (std::size_t pos = 0; pos < n;) {
    const CodePoint cp = DecodeAt(s, pos);
    if (!IsSpace(cp.value)) {
      if (start == kNone) start = pos;
      last_content = pos + cp.size - 1;
    }
    if (start != kNone && cp.value < 0x80 &&
        rules.boundaries.find(static_cast<char>(cp.value)) != std::string::npos) {
      const std::size_t next = pos + 1;
      const bool space_after = next < n && IsSpace(DecodeAt(s, next).value);
      bool guarded = false;
      if (rules.decimal_guard && pos > 0 && next < n &&
          IsDigit(static_cast<unsigned char>(s[pos - 1])) &&
          IsDigit(static_cast<unsigned char>(s[next]))) {
        guarded = true;
      }
      if (cp.value == '.' && is_abbreviation(start, pos)) guarded = true;
      if (space_after && !guarded) {
        emit(start, pos);
        start = kNone;
      }
    }
    pos += cp.size;
  }
  if (start != kNone) emit(start, last_content);
  return sentences;
}

std::vector<Annotation> Tokenize(const Annotation &sentence, const TokenRules &rules) {
  std::vector<Annotation> tokens;
  const std::string &s = sentence.result;
  const std::size_t n = s.size();
  const auto sentence_index = sentence.metadata.find("sentence");

  std::vector<const std::string *> exceptions;
  for (const auto &e : rules.exceptions) exceptions.push_back(&e);
  std::stable_sort(exceptions.begin(), exceptions.end(),
                   [](const std::string *a, const std::string *b) {
                     return a->size() > b->size();
                   });

  const auto is_word = [&](char32_t cp) {
    return IsAlnum(cp) || ContainsCodePoint(rules.extra_word_chars, cp);
  };
  const auto emit = [&](std::size_t begin, std::size_t end) {
    Annotation a;
    a.kind = AnnotationKind::kToken;
    a.begin = sentence.begin + begin;
    a.end = sentence.begin + end;
    a.result = Slice(s, begin, end);
    if (sentence_index != sentence.metadata.end()) {
      a.metadata["sentence"] = sentence_index->second;
    }
    tokens.push_back(std::move(a));
  };

  bool prev_word = false;
  for (std::size_t pos = 0; pos < n;) {
    if (!prev_word && !exceptions.empty()) {
      const std::string *match = nullptr;
      for (const std::string *e : exceptions) {
        if (s.compare(pos, e->size(), *e) != 0) continue;
        const std::size_t after = pos + e->size();
        if (after < n && is_word(DecodeAt(s, after).value)) continue;
        match = e;
        break;
      }
      if (match) {
        emit(pos, pos + match->size() - 1);
        pos += match->size();
        prev_word = false;
        continue;
      }
    }
    const CodePoint cp = DecodeAt(s, pos);
    if (IsSpace(cp.value)) {
      prev_word = false;
      pos += cp.size;
      continue;
    }
    std::size_t end = pos + cp.size;
    if (is_word(cp.value)) {
      while (end < n) {
        const CodePoint next = DecodeAt(s, end);
        if (!is_word(next.value)) break;
        end += next.size;
      }
      prev_word = true;
    } else {
      if (!rules.split_punctuation) {
        while (end < n) {
          const CodePoint next = DecodeAt(s, end);
          if (is_word(next.value) || IsSpace(next.value)) break;
          end += next.size;
        }
      }
      prev_word = false;
    }
    emit(pos, end - 1);
    pos = end;
  }
  return tokens;
}

std::vector<Annotation> Normalize(std::span<const Annotation> tokens,
                                  const NormalizerRules &rules) {
  std::vector<Annotation> out;
  out.reserve(tokens.size());
  for (const Annotation &token : tokens) {
    std::string cleaned;
    for (std::size_t pos = 0; pos < token.result.size();) {
      const CodePoint cp = DecodeAt(token.result, pos);
      pos += cp.size;
      const bool keep = (rules.keep == KeepClass::kAlnum ? IsAlnum(cp.value)
                                                         : IsAlpha(cp.value)) ||
                        ContainsCodePoint(rules.extra_keep, cp.value);
      if (!keep) continue;
      if (rules.lowercase && cp.value >= 'A' && cp.value <= 'Z') {
        cleaned.push_back(static_cast<char>(cp.value - 'A' + 'a'));
      } else {
        AppendUtf8(cleaned, cp.value);
      }
    }
    if (cleaned.empty()) continue;
    Annotation a;
    a.kind = AnnotationKind::kNormalizedToken;
    a.begin = token.begin;
    a.end = token.end;
    a.result = std::move(cleaned);
    a.metadata = token.metadata;
    a.metadata["original"] = token.result;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace annoflow::text
