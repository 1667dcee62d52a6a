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

#include "annoflow/parallel/synthetic.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"

namespace annoflow::parallel {

namespace {

enum class Slot { kNone, kSubject, kSymptom, kDisease, kDrug, kNumber, kTime };

struct Piece {
  Slot slot;
  const char *text;  // literal words when slot == kNone
};

const std::vector<std::string> kSubjects = {"Patient", "The patient", "She", "He"};
const std::vector<std::string> kSymptoms = {
    "nausea",   "vomiting", "fever",        "chest pain", "shortness of breath",
    "headache", "dizziness", "fatigue",     "cough",      "abdominal pain",
    "dyspnea",  "palpitations", "back pain"};
const std::vector<std::string> kDiseases = {
    "diabetes",   "hypertension",       "pneumonia",     "asthma",
    "depression", "atrial fibrillation", "heart failure", "chronic kidney disease",
    "COPD",       "anemia"};
const std::vector<std::string> kDrugs = {"metformin",    "lisinopril", "aspirin",
                                         "insulin",      "atorvastatin", "amoxicillin",
                                         "warfarin",     "furosemide"};
const std::vector<std::string> kNumbers = {"5", "10", "20", "40", "81", "100", "500"};
const std::vector<std::string> kTimes = {"yesterday", "last week", "two days", "this morning"};

const std::vector<std::vector<Piece>> kTemplates = {
    {{Slot::kSubject, ""}, {Slot::kNone, "denies"}, {Slot::kSymptom, ""}, {Slot::kNone, "."}},
    {{Slot::kSubject, ""}, {Slot::kNone, "reports"}, {Slot::kSymptom, ""},
     {Slot::kNone, "and"}, {Slot::kSymptom, ""}, {Slot::kNone, "."}},
    {{Slot::kSubject, ""}, {Slot::kNone, "has a history of"}, {Slot::kDisease, ""},
     {Slot::kNone, "."}},
    {{Slot::kNone, "Family history of"}, {Slot::kDisease, ""}, {Slot::kNone, "."}},
    {{Slot::kSubject, ""}, {Slot::kNone, "was started on"}, {Slot::kDrug, ""},
     {Slot::kNumber, ""}, {Slot::kNone, "mg daily ."}},
    {{Slot::kSymptom, ""}, {Slot::kNone, "while climbing stairs ."}},
    {{Slot::kNone, "No evidence of"}, {Slot::kDisease, ""}, {Slot::kNone, "."}},
    {{Slot::kSubject, ""}, {Slot::kNone, "was admitted with"}, {Slot::kDisease, ""},
     {Slot::kNone, "and treated with"}, {Slot::kDrug, ""}, {Slot::kNone, "."}},
    {{Slot::kSubject, ""}, {Slot::kNone, "complains of"}, {Slot::kSymptom, ""},
     {Slot::kNone, "since"}, {Slot::kTime, ""}, {Slot::kNone, "."}},
    {{Slot::kNone, "Vitals were stable ."}},
    {{Slot::kNone, "Continue"}, {Slot::kDrug, ""}, {Slot::kNone, "for"},
     {Slot::kDisease, ""}, {Slot::kNone, "."}},
};

// Extra sentences used only in noisy documents; they exercise the sentence
// and token rules rather than the tagger.
const std::vector<std::string> kNoisySentences = {
    "Dr. Smith saw the patient at 9 a.m. today.",
    "Dose 2.5 mg b.i.d. was given.",
    "Temp 38.4\xC2\xB0" "C, HR 110 (elevated)!",
    "Pt. is a 67 y.o. male, e.g. stable?",
    "Na\xC3\xAFve caf\xC3\xA9 visit \xE2\x80\x94 r\xC3\xA9sum\xC3\xA9 noted.",
    "BP 120/80; SpO2 98%.",
    "Follow-up in 2 weeks...",
    "\"Quoted remark.\" Next line",
    "x=1 and y>2",
    "\xE5\x8C\xBB\xE9\x99\xA2 visit ok.",
};

const std::vector<std::string> kSeparators = {" ", "  ", "\n", "\t", " \r\n", "\n\n"};

std::size_t Pick(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

const std::vector<std::string> &FillList(Slot slot) {
  switch (slot) {
    case Slot::kSubject: return kSubjects;
    case Slot::kSymptom: return kSymptoms;
    case Slot::kDisease: return kDiseases;
    case Slot::kDrug: return kDrugs;
    case Slot::kNumber: return kNumbers;
    case Slot::kTime: return kTimes;
    case Slot::kNone: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "slot has no fill list");
}

const char *EntityType(Slot slot) {
  switch (slot) {
    case Slot::kSymptom: return "Symptom";
    case Slot::kDisease: return "Disease";
    case Slot::kDrug: return "Drug";
    default: return nullptr;
  }
}

std::vector<std::string> Words(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

eval::ConllSentence MakeSentence(std::mt19937_64 &rng) {
  eval::ConllSentence sentence;
  const auto &tmpl = kTemplates[Pick(rng, kTemplates.size())];
  for (const Piece &piece : tmpl) {
    if (piece.slot == Slot::kNone) {
      for (auto &w : Words(piece.text)) {
        sentence.tokens.push_back(std::move(w));
        sentence.labels.emplace_back(eval::kOutside);
      }
      continue;
    }
    const auto &fills = FillList(piece.slot);
    const char *type = EntityType(piece.slot);
    const auto words = Words(fills[Pick(rng, fills.size())]);
    for (std::size_t i = 0; i < words.size(); ++i) {
      sentence.tokens.push_back(words[i]);
      if (type) {
        sentence.labels.push_back((i == 0 ? "B-" : "I-") + std::string(type));
      } else {
        sentence.labels.emplace_back(eval::kOutside);
      }
    }
  }
  return sentence;
}

// Joins tokens with single spaces, attaching the final period.
std::string SentenceText(const eval::ConllSentence &s) {
  std::string out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const bool attach = s.tokens[i] == "." && i + 1 == s.tokens.size();
    if (i > 0 && !attach) out += ' ';
    out += s.tokens[i];
  }
  return out;
}

}  // namespace

void CorpusParams::Validate() const {
  if (min_sentences < 0 || max_sentences < min_sentences) {
    throw Error(ErrorCode::kInvalidArgument,
                "sentence range must satisfy 0 <= min <= max");
  }
}

Frame SyntheticCorpus(const CorpusParams &params) {
  params.Validate();
  std::mt19937_64 rng(params.seed);
  Frame frame;
  frame.records.reserve(params.docs);
  const auto span = static_cast<std::size_t>(params.max_sentences - params.min_sentences + 1);
  for (std::size_t d = 0; d < params.docs; ++d) {
    DocumentRecord record;
    record.id = "doc-" + std::to_string(d);
    const std::size_t n = static_cast<std::size_t>(params.min_sentences) + Pick(rng, span);
    if (params.noise && Pick(rng, 50) == 0) {
      frame.records.push_back(std::move(record));
      continue;
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (s > 0) {
        record.text += params.noise ? kSeparators[Pick(rng, kSeparators.size())] : " ";
      }
      if (params.noise && Pick(rng, 3) == 0) {
        record.text += kNoisySentences[Pick(rng, kNoisySentences.size())];
      } else {
        record.text += SentenceText(MakeSentence(rng));
      }
    }
    if (params.noise) {
      if (Pick(rng, 4) == 0) record.text.insert(0, kSeparators[Pick(rng, kSeparators.size())]);
      if (Pick(rng, 4) == 0) record.text += kSeparators[Pick(rng, kSeparators.size())];
      if (Pick(rng, 10) == 0 && !record.text.empty()) {
        std::size_t at = Pick(rng, record.text.size() + 1);
        while (at < record.text.size() &&
               (static_cast<unsigned char>(record.text[at]) & 0xC0) == 0x80) {
          --at;
        }
        record.text.insert(at, 1, '\x07');
      }
    }
    frame.records.push_back(std::move(record));
  }
  return frame;
}

eval::ConllDataset SyntheticLabeledSentences(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  eval::ConllDataset data;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    data.sentences.push_back(MakeSentence(rng));
    const auto &labels = data.sentences.back().labels;
    seen.insert(seen.end(), labels.begin(), labels.end());
  }
  data.inventory = eval::CanonicalInventory(seen);
  return data;
}

std::vector<std::string> SyntheticVocabulary() {
  std::set<std::string> vocab;
  auto add = [&](const std::string &s) {
    for (auto w : Words(s)) {
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      vocab.insert(w);
    }
  };
  for (const auto *list : {&kSubjects, &kSymptoms, &kDiseases, &kDrugs, &kNumbers, &kTimes}) {
    for (const auto &s : *list) add(s);
  }
  for (const auto &tmpl : kTemplates) {
    for (const Piece &p : tmpl) {
      if (p.slot == Slot::kNone) add(p.text);
    }
  }
  return {vocab.begin(), vocab.end()};
}

embeddings::EmbeddingTable SyntheticEmbeddings(std::size_t dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  embeddings::EmbeddingTable table(dimension);
  std::vector<float> v(dimension);
  for (const auto &word : SyntheticVocabulary()) {
    for (auto &x : v) {
      const double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      x = static_cast<float>(2.0 * u - 1.0);
    }
    table.Add(word, v);
  }
  return table;
}

}  // namespace annoflow::parallel
