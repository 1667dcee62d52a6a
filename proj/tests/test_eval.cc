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

#include <sstream>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"
#include "annoflow/eval/conll.h"
#include "annoflow/eval/metrics.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace annoflow;
using namespace annoflow::eval;

namespace {

using Tags = std::vector<std::string>;

ConllDataset Read(const std::string &text) {
  std::istringstream in(text);
  return ReadConll(in, "inline");
}

std::vector<std::vector<std::string>> RandomCorpus(oracle::Gen &g, std::size_t sentences,
                                                   const std::vector<std::string> &types,
                                                   bool valid) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < sentences; ++i) {
    out.push_back(oracle::RandomTags(g, static_cast<std::size_t>(g.Int(0, 12)), types, valid));
  }
  return out;
}

// Same shape as `gold`, tags perturbed at random.
std::vector<std::vector<std::string>> Perturb(oracle::Gen &g,
                                              std::vector<std::vector<std::string>> gold,
                                              const std::vector<std::string> &types) {
  for (auto &s : gold) {
    const auto fresh = oracle::RandomTags(g, s.size(), types, g.Coin());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (g.Coin(0.3)) s[i] = fresh[i];
    }
  }
  return gold;
}

}  // namespace

TEST_CASE("read_conll on a two-sentence file") {
  const auto d = Read(
      "-DOCSTART- -X- O O\n\nPatient NN O\nhas VB O\ndiabetes NN B-Disease\n\n"
      "Take\tVB\tO\naspirin NN\tB-Drug\n");
  REQUIRE(d.sentences.size() == 2);
  CHECK(d.sentences[0].tokens == Tags{"Patient", "has", "diabetes"});
  CHECK(d.sentences[0].labels == Tags{"O", "O", "B-Disease"});
  CHECK(d.sentences[1].labels == Tags{"O", "B-Drug"});
  CHECK(d.token_count() == 5);
  CHECK(d.inventory.front() == "O");
  CHECK(d.iob1_conversions == 0);
}

TEST_CASE("read_conll errors and degenerate input") {
  auto err = testing::CatchError([] { Read("a O\nb X-Disease\n"); });
  REQUIRE(err);
  CHECK(err->code() == ErrorCode::kInvalidLabel);
  CHECK(err->line() == 2);
  CHECK_ERROR_CODE(Read("lonely\n"), ErrorCode::kRaggedLine);
  auto ragged = testing::CatchError([] { Read("a NN O\n\nb O\n"); });
  REQUIRE(ragged);
  CHECK(ragged->code() == ErrorCode::kRaggedLine);
  CHECK(ragged->line() == 3);
  CHECK(Read("").sentences.empty());
  CHECK(Read("\n\n\n").sentences.empty());
  CHECK_ERROR_CODE(ReadConllFile("/nonexistent.conll"), ErrorCode::kIo);
}

TEST_CASE("read_conll converts IOB1 to IOB2 and counts conversions") {
  const auto d = Read("a I-X\nb I-X\nc O\nd I-Y\ne B-Y\n");
  CHECK(d.sentences[0].labels == Tags{"B-X", "I-X", "O", "B-Y", "B-Y"});
  CHECK(d.iob1_conversions == 2);
}

TEST_CASE("the shipped toy corpora load") {
  const auto toy20 = ReadConllFile(testing::DataPath("toy20.conll"));
  CHECK(toy20.sentences.size() == 20);
  const auto toy5 = ReadConllFile(testing::DataPath("toy5.conll"));
  CHECK(toy5.sentences.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(toy5.sentences[i].tokens == toy20.sentences[i].tokens);
    CHECK(toy5.sentences[i].labels == toy20.sentences[i].labels);
  }
}

TEST_CASE("merging datasets concatenates sentences and unions inventories") {
  const auto a = Read("x B-A\n");
  const auto b = Read("y B-B\ny2 I-B\n");
  const auto m = MergeDatasets(a, b);
  CHECK(m.sentences.size() == 2);
  CHECK(m.inventory == CanonicalInventory({"B-A", "B-B", "I-B", "O"}));
  CHECK(m.inventory.front() == "O");
}

TEST_CASE("chunk_extract examples") {
  const auto chunks = ChunkExtract(Tags{"B-Dis", "I-Dis", "O", "B-Chem"});
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0] == Chunk{0, 0, 1, "Dis", false});
  CHECK(chunks[1] == Chunk{0, 3, 3, "Chem", false});
  CHECK(ChunkExtract(Tags{"O", "O"}).empty());
  const auto repaired = ChunkExtract(Tags{"I-Dis", "I-Dis"});
  REQUIRE(repaired.size() == 1);
  CHECK(repaired[0].begin == 0);
  CHECK(repaired[0].end == 1);
  CHECK(repaired[0].repaired);
}

TEST_CASE("micro_f1 examples") {
  const std::vector<Tags> gold = {{"B-Dis", "I-Dis", "O", "B-Chem"}};
  const auto same = MicroF1(gold, gold);
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.f1 == 1.0);

  const std::vector<Tags> half = {{"B-Dis", "I-Dis", "O", "O"}};
  const auto r = MicroF1(half, gold);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.5);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.overall == Counts{1, 0, 1});

  const std::vector<Tags> none = {{"O", "O", "O", "O"}};
  const auto z = MicroF1(none, gold);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);

  CHECK_ERROR_CODE(MicroF1({{"O"}}, gold), ErrorCode::kLengthMismatch);
  CHECK_ERROR_CODE(MicroF1({{"O"}, {"O"}}, gold), ErrorCode::kLengthMismatch);
}

TEST_CASE("micro_f1 matches the brute-force scorer exactly") {
  oracle::Gen g(31);
  const std::vector<std::string> types = {"Dis", "Chem", "Gene"};
  for (int trial = 0; trial < 300; ++trial) {
    const auto gold = RandomCorpus(g, static_cast<std::size_t>(g.Int(1, 6)), types, g.Coin());
    const auto pred = Perturb(g, gold, types);
    const auto got = MicroF1(pred, gold);
    const auto want = oracle::BruteForceScore(pred, gold);
    CHECK(got.overall.tp == want.tp);
    CHECK(got.overall.fp == want.fp);
    CHECK(got.overall.fn == want.fn);
    CHECK(got.precision == want.precision);
    CHECK(got.recall == want.recall);
    CHECK(got.f1 == want.f1);
  }
}

TEST_CASE("swapping predictions and gold swaps precision and recall") {
  oracle::Gen g(32);
  const std::vector<std::string> types = {"A", "B"};
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = RandomCorpus(g, 4, types, true);
    const auto b = Perturb(g, a, types);
    const auto ab = MicroF1(a, b);
    const auto ba = MicroF1(b, a);
    CHECK(ab.precision == ba.recall);
    CHECK(ab.recall == ba.precision);
    CHECK(ab.f1 == ba.f1);
  }
}

TEST_CASE("overall counts are the sum of per-type counts") {
  oracle::Gen g(33);
  const std::vector<std::string> types = {"A", "B", "C"};
  for (const auto mode : {ScoreMode::kChunk, ScoreMode::kTokenExcludingO}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = RandomCorpus(g, 5, types, false);
      const auto r = MicroF1(Perturb(g, a, types), a, mode);
      Counts sum;
      for (const auto &[type, c] : r.per_type) {
        sum.tp += c.tp;
        sum.fp += c.fp;
        sum.fn += c.fn;
      }
      CHECK(sum == r.overall);
    }
  }
}

TEST_CASE("token mode ignores tokens where both sides are O") {
  const std::vector<Tags> gold = {{"B-A", "I-A", "O", "O"}};
  const std::vector<Tags> pred = {{"B-A", "O", "O", "B-A"}};
  const auto r = MicroF1(pred, gold, ScoreMode::kTokenExcludingO);
  CHECK(r.overall == Counts{1, 1, 1});
}

TEST_CASE("report renders as JSON and as a table") {
  const std::vector<Tags> gold = {{"B-Dis", "O", "B-Chem"}};
  const auto r = MicroF1(gold, gold);
  const Json j = r.ToJson();
  CHECK(j["f1"] == 1.0);
  CHECK(j["mode"] == "chunk");
  CHECK(j["per_type"].contains("Dis"));
  const std::string table = r.ToTable();
  CHECK(table.find("Chem") != std::string::npos);
  CHECK(table.find("overall") != std::string::npos);
}

TEST_CASE("BIO helpers") {
  CHECK(IsValidBio(Tags{"O", "B-A", "I-A"}));
  CHECK_FALSE(IsValidBio(Tags{"O", "I-A"}));
  CHECK_FALSE(IsValidBio(Tags{"B-A", "I-B"}));
  CHECK(BioTransitionAllowed("", "B-A"));
  CHECK_FALSE(BioTransitionAllowed("", "I-A"));
  CHECK_FALSE(ParseBio("B-"));
  CHECK_FALSE(ParseBio("X-Disease"));
  CHECK(CanonicalInventory({"I-B", "B-A", "O", "B-A"}) == Tags{"O", "B-A", "I-B"});
  oracle::Gen g(34);
  for (int i = 0; i < 500; ++i) {
    const auto tags = oracle::RandomTags(g, 10, {"A", "B"}, g.Coin());
    CHECK(IsValidBio(tags) == oracle::ValidBio(tags));
  }
}

TEST_CASE("labeled CoNLL data becomes a seeded frame") {
  const auto d = Read("Patient O\nhas O\nflu B-Dis\n\nOK O\n");
  const Frame f = ConllToFrame(d, true);
  REQUIRE(f.size() == 2);
  CHECK(f.records[0].id == "s0");
  CHECK(f.records[0].text == "Patient has flu");
  CHECK(testing::Results(f.records[0].column("token")) == Tags{"Patient", "has", "flu"});
  CHECK(testing::Results(f.records[0].column(kLabelColumn)) == Tags{"O", "O", "B-Dis"});
  CHECK(f.records[0].column("token")[2].begin == 12);
  CHECK(f.schema.count("label") == 1);
  CHECK(ConllToFrame(d, false).schema.count("label") == 0);
}
