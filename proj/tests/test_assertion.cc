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

#include <cmath>
#include <numeric>
#include <sstream>

#include "annoflow/assertion/assertion.h"
#include "annoflow/core/error.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace annoflow;
using namespace annoflow::assertion;

namespace {

std::vector<std::vector<float>> Basis(std::size_t n, std::size_t dim) {
  std::vector<std::vector<float>> out(n, std::vector<float>(dim, 0.0f));
  for (std::size_t i = 0; i < n; ++i) out[i][i % dim] = 1.0f;
  return out;
}

std::vector<std::vector<float>> RandomSentence(oracle::Gen &g, std::size_t n, std::size_t dim) {
  std::vector<std::vector<float>> out(n, std::vector<float>(dim));
  for (auto &v : out) {
    for (auto &x : v) x = static_cast<float>(g.Real(-1, 1));
  }
  return out;
}

// Eight sentences whose label is decided by a cue vector on the token left of the chunk.
std::vector<AssertionExample> SeparableSet() {
  std::vector<AssertionExample> data;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    for (int variant = 0; variant < 2; ++variant) {
      AssertionExample ex;
      ex.sentence = std::vector<std::vector<float>>(3, std::vector<float>(kLabelCount + 1, 0.0f));
      ex.sentence[0][c] = 1.0f;
      ex.sentence[1][kLabelCount] = variant == 0 ? 1.0f : 0.5f;
      ex.chunk_begin = 1;
      ex.chunk_end = 1;
      ex.label = kAllLabels[c];
      data.push_back(ex);
    }
  }
  return data;
}

}  // namespace

TEST_CASE("labels are a closed set of four") {
  CHECK(kLabelCount == 4);
  for (const auto label : kAllLabels) CHECK(ParseLabel(LabelName(label)) == label);
  CHECK(LabelName(AssertionLabel::kAssociatedWithSomeoneElse) == "associated_with_someone_else");
  CHECK_ERROR_CODE(ParseLabel("possible"), ErrorCode::kInvalidLabel);
}

TEST_CASE("featurize examples") {
  const auto sentence = Basis(5, 5);
  const auto start = Featurize(sentence, 5, 0, 0, 5);
  for (std::size_t d = 0; d < 5; ++d) CHECK(start[d] == 0.0);
  CHECK(start[5 + 0] == 1.0);

  const auto whole = Featurize(sentence, 5, 0, 4, 5);
  for (std::size_t d = 0; d < 5; ++d) {
    CHECK(whole[d] == 0.0);
    CHECK(whole[5 + d] == doctest::Approx(0.2));
    CHECK(whole[10 + d] == 0.0);
  }

  // Chunk token 2 with window 1: left is token 1, right is token 3.
  const auto mid = Featurize(sentence, 5, 2, 2, 1);
  CHECK(mid == std::vector<double>{0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0});
  // Chunk tokens 1..2 with window 5: left {0}, right {3, 4}.
  const auto wide = Featurize(sentence, 5, 1, 2, 5);
  CHECK(wide == std::vector<double>{1, 0, 0, 0, 0, 0, 0.5, 0.5, 0, 0, 0, 0, 0, 0.5, 0.5});

  CHECK_ERROR_CODE(Featurize(sentence, 5, 3, 5, 5), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(Featurize(sentence, 5, 3, 2, 5), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(Featurize(sentence, 4, 0, 0, 5), ErrorCode::kDimensionMismatch);
}

TEST_CASE("featurize agrees with direct recomputation as the chunk slides") {
  oracle::Gen g(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(g.Int(1, 15));
    const auto dim = static_cast<std::size_t>(g.Int(1, 4));
    const int window = static_cast<int>(g.Int(0, 6));
    const auto sentence = RandomSentence(g, n, dim);
    const auto len = static_cast<std::size_t>(g.Int(0, static_cast<std::int64_t>(n) - 1));
    for (std::size_t begin = 0; begin + len < n; ++begin) {
      const auto got = Featurize(sentence, dim, begin, begin + len, window);
      const auto want = oracle::DirectFeatures(sentence, begin, begin + len, window);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("config validation and JSON") {
  AssertionConfig c;
  CHECK_NOTHROW(c.Validate());
  c.epochs = -1;
  CHECK_ERROR_CODE(c.Validate(), ErrorCode::kConfig);
  c = AssertionConfig{};
  c.learning_rate = 0;
  CHECK_ERROR_CODE(c.Validate(), ErrorCode::kConfig);
  AssertionConfig d;
  d.window = 2;
  d.seed = 9;
  CHECK(AssertionConfig::FromJson(d.ToJson()) == d);
  CHECK_ERROR_CODE(AssertionConfig::FromJson(Json{{"window", "wide"}}), ErrorCode::kConfig);
}

TEST_CASE("zero-weight model is uniform and predicts present") {
  const AssertionModel model(3, 5);
  const auto p = model.Predict(Basis(4, 3), 1, 2);
  CHECK(p.label == AssertionLabel::kPresent);
  for (double x : p.probabilities) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("probabilities lie in [0,1] and sum to one") {
  oracle::Gen g(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto dim = static_cast<std::size_t>(g.Int(1, 6));
    AssertionModel model(dim, 3);
    for (auto &w : model.weights()) w = g.Real(-20, 20);
    for (auto &b : model.bias()) b = g.Real(-20, 20);
    const auto n = static_cast<std::size_t>(g.Int(1, 10));
    const auto begin = static_cast<std::size_t>(g.Int(0, static_cast<std::int64_t>(n) - 1));
    const auto p = model.Predict(RandomSentence(g, n, dim), begin, begin);
    const double sum = std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (double x : p.probabilities) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    const auto best = std::max_element(p.probabilities.begin(), p.probabilities.end());
    CHECK(static_cast<std::size_t>(p.label) ==
          static_cast<std::size_t>(best - p.probabilities.begin()));
  }
}

TEST_CASE("separable eight-example set is fit exactly within 500 epochs") {
  const auto data = SeparableSet();
  AssertionConfig c;
  c.window = 1;
  const auto result = TrainAssertion(data, c);
  CHECK(result.loss_trace.size() == 500);
  CHECK(result.warnings.empty());
  CHECK(result.loss_trace.back() < result.loss_trace.front());
  for (const auto &ex : data) {
    CHECK(result.model.Predict(ex.sentence, ex.chunk_begin, ex.chunk_end).label == ex.label);
  }
}

TEST_CASE("zero epochs returns the initialization") {
  AssertionConfig c;
  c.epochs = 0;
  const auto result = TrainAssertion(SeparableSet(), c);
  CHECK(result.loss_trace.empty());
  CHECK(result.model == AssertionModel::Initialize(kLabelCount + 1, c));
}

TEST_CASE("training is seed-deterministic and warns about missing labels") {
  auto data = SeparableSet();
  data.resize(4);  // present and absent only
  AssertionConfig c;
  c.epochs = 50;
  const auto a = TrainAssertion(data, c);
  const auto b = TrainAssertion(data, c);
  CHECK(a.model.Serialize() == b.model.Serialize());
  CHECK(a.warnings.size() == 2);
  c.seed = 7;
  CHECK(TrainAssertion(data, c).model.Serialize() != a.model.Serialize());
  CHECK_ERROR_CODE(TrainAssertion(std::vector<AssertionExample>{}, c),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("divergent training reports a numeric error") {
  AssertionConfig c;
  c.learning_rate = 1e308;
  c.epochs = 50;
  auto data = SeparableSet();
  for (auto &ex : data) {
    for (auto &v : ex.sentence) {
      for (auto &x : v) x *= 1e30f;
    }
  }
  CHECK_ERROR_CODE(TrainAssertion(data, c), ErrorCode::kNumeric);
}

TEST_CASE("model blob round trip") {
  AssertionConfig c;
  c.epochs = 20;
  const auto model = TrainAssertion(SeparableSet(), c).model;
  const auto bytes = model.Serialize();
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "ANNOASR1");
  CHECK(AssertionModel::Deserialize(bytes) == model);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_ERROR_CODE(AssertionModel::Deserialize(longer), ErrorCode::kParse);
}

TEST_CASE("JSONL training data reader") {
  std::istringstream good(
      R"({"text":"patient denies nausea","chunk_begin":15,"chunk_end":20,"label":"absent"})"
      "\n\n"
      R"({"text":"mother had asthma","chunk_begin":11,"chunk_end":16,"label":"associated_with_someone_else"})"
      "\n");
  const auto records = ReadAssertionJsonl(good);
  REQUIRE(records.size() == 2);
  CHECK(records[0].label == AssertionLabel::kAbsent);
  CHECK(records[1].chunk_end == 16);

  std::istringstream bad_label(
      R"({"text":"a b","chunk_begin":0,"chunk_end":0,"label":"maybe"})");
  auto err = testing::CatchError([&] { ReadAssertionJsonl(bad_label); });
  REQUIRE(err);
  CHECK(err->code() == ErrorCode::kInvalidLabel);
  CHECK(err->line() == 1);

  std::istringstream bad_json("{\"text\":\"a\"}\n{oops\n");
  CHECK_ERROR_CODE(ReadAssertionJsonl(bad_json), ErrorCode::kParse);
  std::istringstream bad_span(R"({"text":"ab","chunk_begin":1,"chunk_end":5,"label":"absent"})");
  CHECK_ERROR_CODE(ReadAssertionJsonl(bad_span), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(ReadAssertionJsonlFile("/nonexistent.jsonl"), ErrorCode::kIo);

  const auto toy = ReadAssertionJsonlFile(testing::DataPath("assertion_toy.jsonl"));
  CHECK(toy.size() == 40);
}
