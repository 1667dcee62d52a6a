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

#include <algorithm>
#include <atomic>
#include <cstdlib>

#include "annoflow/core/error.h"
#include "annoflow/core/jsonl.h"
#include "annoflow/core/pipeline.h"
#include "annoflow/parallel/benchmark.h"
#include "annoflow/parallel/executor.h"
#include "annoflow/parallel/synthetic.h"
#include "annoflow/stages/workflows.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace annoflow;
using namespace annoflow::parallel;

namespace {

FittedPipeline RulePipeline() {
  auto specs = stages::RuleStageSpecs();
  specs.push_back(StageSpec{"normalizer", "Normalizer", {}, {}, Json::object()});
  return PipelineFit(specs, Frame{});
}

std::vector<std::size_t> Sizes(const PartitionPlan &plan) {
  std::vector<std::size_t> out;
  for (const auto &r : plan.ranges) out.push_back(r.size());
  return out;
}

}  // namespace

TEST_CASE("partition examples") {
  CHECK(Sizes(Partition(10, 3)) == std::vector<std::size_t>{4, 3, 3});
  const auto one = Partition(10, 1);
  REQUIRE(one.ranges.size() == 1);
  CHECK(one.ranges[0] == Range{0, 10});
  CHECK(Sizes(Partition(3, 5)) == std::vector<std::size_t>{1, 1, 1, 0, 0});
  CHECK_ERROR_CODE(Partition(10, 0), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(Partition(10, -2), ErrorCode::kInvalidArgument);
}

TEST_CASE("property: partitions are contiguous, ordered, covering and balanced") {
  oracle::Gen g(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(g.Int(0, 200));
    const int p = static_cast<int>(g.Int(1, 40));
    const auto plan = Partition(n, p);
    REQUIRE(plan.ranges.size() == static_cast<std::size_t>(p));
    std::size_t cursor = 0, lo = n, hi = 0;
    for (const auto &r : plan.ranges) {
      CHECK(r.begin == cursor);
      cursor = r.end;
      lo = std::min(lo, r.size());
      hi = std::max(hi, r.size());
    }
    CHECK(cursor == n);
    CHECK(hi - std::min(lo, hi) <= 1);
  }
}

TEST_CASE("run_parallel is byte-identical to serial transform") {
  const auto pipeline = RulePipeline();
  oracle::Gen g(42);
  for (int trial = 0; trial < 12; ++trial) {
    CorpusParams params;
    params.docs = static_cast<std::size_t>(g.Int(0, 150));
    params.max_sentences = static_cast<int>(g.Int(1, 6));
    params.noise = g.Coin();
    params.seed = g.Next();
    const Frame corpus = SyntheticCorpus(params);
    const std::string serial = SerializeFrame(pipeline.Transform(corpus));
    for (int w : {1, 2, 4, 8}) {
      const int partitions = static_cast<int>(g.Int(1, 40));
      const Frame out = RunParallel(pipeline, corpus, w, partitions);
      CHECK(SerializeFrame(out) == serial);
      CHECK(SerializeFrame(RunParallel(pipeline, corpus, w)) == serial);
      CHECK(out.schema == pipeline.Transform(corpus).schema);
    }
  }
}

TEST_CASE("run_parallel on an empty frame") {
  const auto pipeline = RulePipeline();
  for (int w : {1, 3, 8}) {
    const Frame out = RunParallel(pipeline, Frame{}, w);
    CHECK(out.records.empty());
    CHECK(out.schema.count("token") == 1);
  }
  CHECK_ERROR_CODE(RunParallel(pipeline, Frame{}, 0), ErrorCode::kInvalidArgument);
}

TEST_CASE("run_parallel keeps record order and per-record errors") {
  const auto pipeline = RulePipeline();
  Frame f = SyntheticCorpus(CorpusParams{97, 1, 3, 5, true});
  f.records[10].error = "malformed JSON at line 11";
  const Frame out = RunParallel(pipeline, f, 4, 7);
  REQUIRE(out.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(out.records[i].id == f.records[i].id);
  CHECK(out.records[10].error == f.records[10].error);
  CHECK(out.records[10].columns.empty());
}

TEST_CASE("the thread pool runs every task and drains on destruction") {
  std::atomic<int> count{0};
  {
    ThreadPool pool(3);
    CHECK(pool.size() == 3);
    for (int i = 0; i < 500; ++i) pool.Submit([&] { count.fetch_add(1); });
  }
  CHECK(count.load() == 500);
  CHECK_ERROR_CODE(ThreadPool(0), ErrorCode::kInvalidArgument);
}

TEST_CASE("worker count resolution") {
  ::unsetenv("ANNOFLOW_WORKERS");
  CHECK(ResolveWorkers(3) == 3);
  CHECK(ResolveWorkers(std::nullopt) >= 1);
  ::setenv("ANNOFLOW_WORKERS", "5", 1);
  CHECK(ResolveWorkers(std::nullopt) == 5);
  CHECK(ResolveWorkers(2) == 2);
  ::setenv("ANNOFLOW_WORKERS", "many", 1);
  CHECK_ERROR_CODE(ResolveWorkers(std::nullopt), ErrorCode::kInvalidArgument);
  ::setenv("ANNOFLOW_WORKERS", "0", 1);
  CHECK_ERROR_CODE(ResolveWorkers(std::nullopt), ErrorCode::kInvalidArgument);
  ::unsetenv("ANNOFLOW_WORKERS");
  CHECK_ERROR_CODE(ResolveWorkers(0), ErrorCode::kInvalidArgument);
}

TEST_CASE("synthetic corpus is seeded and shaped by its parameters") {
  CorpusParams p;
  p.docs = 50;
  const Frame a = SyntheticCorpus(p);
  CHECK(a.size() == 50);
  CHECK(a.records[0].id == "doc-0");
  CHECK(SerializeFrame(a) == SerializeFrame(SyntheticCorpus(p)));
  p.seed = 43;
  CHECK(SerializeFrame(a) != SerializeFrame(SyntheticCorpus(p)));
  CorpusParams noisy;
  noisy.docs = 2000;
  noisy.noise = true;
  for (const auto &r : SyntheticCorpus(noisy).records) CHECK_NOTHROW((void)Json(r.text).dump());
  p.min_sentences = 4;
  p.max_sentences = 2;
  CHECK_ERROR_CODE(p.Validate(), ErrorCode::kInvalidArgument);

  const auto labeled = SyntheticLabeledSentences(30, 1);
  CHECK(labeled.sentences.size() == 30);
  for (const auto &s : labeled.sentences) CHECK(s.tokens.size() == s.labels.size());
  const auto table = SyntheticEmbeddings(8, 1);
  CHECK(table.dimension() == 8);
  CHECK(table.size() == SyntheticVocabulary().size());
}

TEST_CASE("benchmark report structure") {
  const auto pipeline = RulePipeline();
  const Frame corpus = SyntheticCorpus(CorpusParams{60, 1, 4, 3, false});
  BenchParams params;
  params.workers = {1, 2};
  params.repetitions = 3;
  const BenchReport report = Benchmark(pipeline, corpus, params);
  CHECK(report.docs == 60);
  CHECK(report.mean_doc_length > 0.0);
  CHECK(report.hardware_threads >= 1);
  for (const auto &stage : pipeline.stages()) {
    const auto &one = report.Find(stage.spec.id, 1);
    CHECK(one.speedup == 1.0);
    CHECK(one.seconds.size() == 3);
    CHECK(one.dispersion.min <= one.dispersion.median);
    CHECK(one.dispersion.median <= one.dispersion.max);
    CHECK(report.Find(stage.spec.id, 2).speedup > 0.0);
  }
  CHECK(report.Find("pipeline", 1).speedup == 1.0);
  CHECK(report.Find("pipeline", 1).docs_per_sec > 0.0);
  CHECK_ERROR_CODE(report.Find("nope", 1), ErrorCode::kInvalidArgument);

  const Json j = report.ToJson();
  CHECK(j["corpus"]["docs"] == 60);
  CHECK(j["timings"].size() == report.timings.size());
  const std::string csv = report.ToCsv();
  CHECK(csv.rfind("stage,", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        report.timings.size() + 1);
}

TEST_CASE("benchmark parameters are validated") {
  BenchParams p;
  p.workers = {2, 4};
  CHECK_ERROR_CODE(p.Validate(), ErrorCode::kInvalidArgument);
  p.workers = {1, 4};
  p.repetitions = 2;
  CHECK_ERROR_CODE(p.Validate(), ErrorCode::kInvalidArgument);
  const auto s = Summarize({3.0, 1.0, 2.0});
  CHECK(s.min == 1.0);
  CHECK(s.median == 2.0);
  CHECK(s.max == 3.0);
  CHECK(Summarize({4.0, 1.0, 2.0, 3.0}).median == 2.5);
}
