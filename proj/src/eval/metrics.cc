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

#include "annoflow/eval/metrics.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"

namespace annoflow::eval {

std::vector<Chunk> ChunkExtract(std::span<const std::string> labels, std::size_t sentence) {
  std::vector<Chunk> chunks;
  bool open = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto tag = ParseBio(labels[i]);
    if (!tag || tag->prefix == BioTag::Prefix::kOutside) {
      open = false;
      continue;
    }
    if (tag->prefix == BioTag::Prefix::kInside && open && chunks.back().type == tag->type) {
      chunks.back().end = i;
      continue;
    }
    chunks.push_back(Chunk{sentence, i, i, tag->type,
                           tag->prefix == BioTag::Prefix::kInside});
    open = true;
  }
  return chunks;
}

double SafeRatio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double F1Score(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

namespace {

using ChunkKey = std::tuple<std::size_t, std::size_t, std::size_t, std::string>;

std::string TypeOf(const std::string &label) {
  const auto tag = ParseBio(label);
  if (!tag || tag->prefix == BioTag::Prefix::kOutside) return {};
  return tag->type;
}

void Finish(EvalReport &report) {
  for (const auto &[type, c] : report.per_type) {
    report.overall.tp += c.tp;
    report.overall.fp += c.fp;
    report.overall.fn += c.fn;
  }
  report.precision = SafeRatio(report.overall.tp, report.overall.tp + report.overall.fp);
  report.recall = SafeRatio(report.overall.tp, report.overall.tp + report.overall.fn);
  report.f1 = F1Score(report.precision, report.recall);
}

}  // namespace

EvalReport MicroF1(const std::vector<std::vector<std::string>> &predicted,
                   const std::vector<std::vector<std::string>> &gold, ScoreMode mode) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(predicted.size()) + " predicted vs " +
                    std::to_string(gold.size()) + " gold sentences");
  }
  EvalReport report;
  report.mode = mode;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (predicted[s].size() != gold[s].size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sentence " + std::to_string(s) + " has " +
                      std::to_string(predicted[s].size()) + " predicted vs " +
                      std::to_string(gold[s].size()) + " gold labels");
    }
    if (mode == ScoreMode::kTokenExcludingO) {
      for (std::size_t t = 0; t < gold[s].size(); ++t) {
        const std::string g = TypeOf(gold[s][t]);
        const std::string p = TypeOf(predicted[s][t]);
        if (!g.empty() && g == p) {
          ++report.per_type[g].tp;
          continue;
        }
        if (!p.empty()) ++report.per_type[p].fp;
        if (!g.empty()) ++report.per_type[g].fn;
      }
      continue;
    }
    std::set<ChunkKey> gold_keys;
    for (const auto &c : ChunkExtract(gold[s], s)) {
      gold_keys.emplace(c.sentence, c.begin, c.end, c.type);
      report.per_type[c.type];
    }
    std::set<ChunkKey> matched;
    for (const auto &c : ChunkExtract(predicted[s], s)) {
      const ChunkKey key{c.sentence, c.begin, c.end, c.type};
      if (gold_keys.count(key)) {
        ++report.per_type[c.type].tp;
        matched.insert(key);
      } else {
        ++report.per_type[c.type].fp;
      }
    }
    for (const auto &key : gold_keys) {
      if (!matched.count(key)) ++report.per_type[std::get<3>(key)].fn;
    }
  }
  Finish(report);
  return report;
}

Json EvalReport::ToJson() const {
  Json types = Json::object();
  for (const auto &[type, c] : per_type) {
    const double p = SafeRatio(c.tp, c.tp + c.fp);
    const double r = SafeRatio(c.tp, c.tp + c.fn);
    types[type] = {{"tp", c.tp}, {"fp", c.fp},       {"fn", c.fn},
                   {"precision", p}, {"recall", r}, {"f1", F1Score(p, r)}};
  }
  return Json{{"mode", mode == ScoreMode::kChunk ? "chunk" : "token_excluding_o"},
              {"per_type", types},
              {"tp", overall.tp},
              {"fp", overall.fp},
              {"fn", overall.fn},
              {"precision", precision},
              {"recall", recall},
              {"f1", f1}};
}

std::string EvalReport::ToTable() const {
  std::size_t width = 7;
  for (const auto &[type, c] : per_type) width = std::max(width, type.size());
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s %7s %7s %7s %9s %9s %9s\n", static_cast<int>(width),
                "type", "tp", "fp", "fn", "precision", "recall", "f1");
  out << buf;
  const auto row = [&](const std::string &name, const Counts &c, double p, double r,
                       double f) {
    std::snprintf(buf, sizeof buf, "%-*s %7zu %7zu %7zu %9.4f %9.4f %9.4f\n",
                  static_cast<int>(width), name.c_str(), c.tp, c.fp, c.fn, p, r, f);
    out << buf;
  };
  for (const auto &[type, c] : per_type) {
    const double p = SafeRatio(c.tp, c.tp + c.fp);
    const double r = SafeRatio(c.tp, c.tp + c.fn);
    row(type, c, p, r, F1Score(p, r));
  }
  row("overall", overall, precision, recall, f1);
  return out.str();
}

}  // namespace annoflow::eval
