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

#include "annoflow/parallel/benchmark.h"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <thread>

#include "annoflow/core/error.h"
#include "annoflow/parallel/executor.h"

namespace annoflow::parallel {

namespace {

double TimeRun(const FittedPipeline &pipeline, const Frame &corpus, ThreadPool &pool) {
  const auto start = std::chrono::steady_clock::now();
  const Frame out = RunParallel(pipeline, corpus, pool);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

void BenchParams::Validate() const {
  if (std::find(workers.begin(), workers.end(), 1) == workers.end()) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark worker counts must include 1");
  }
  for (int w : workers) {
    if (w < 1) throw Error(ErrorCode::kInvalidArgument, "worker counts must be >= 1");
  }
  if (repetitions < 3) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark needs at least 3 repetitions");
  }
}

Dispersion Summarize(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const double median =
      n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  return {samples.front(), median, samples.back()};
}

const StageTiming &BenchReport::Find(const std::string &stage, int w) const {
  for (const auto &t : timings) {
    if (t.stage == stage && t.workers == w) return t;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no timing for stage '" + stage + "' at " + std::to_string(w) + " workers");
}

BenchReport Benchmark(const FittedPipeline &pipeline, const Frame &corpus,
                      const BenchParams &params) {
  params.Validate();
  BenchReport report;
  report.docs = corpus.size();
  std::size_t bytes = 0;
  for (const auto &r : corpus.records) bytes += r.text.size();
  report.mean_doc_length =
      corpus.empty() ? 0.0 : static_cast<double>(bytes) / static_cast<double>(corpus.size());
  report.repetitions = params.repetitions;
  report.workers = params.workers;
  report.hardware_threads = std::thread::hardware_concurrency();

  const std::size_t n = pipeline.size();
  std::vector<FittedPipeline> prefixes;
  for (std::size_t k = 0; k <= n; ++k) prefixes.push_back(pipeline.Prefix(k));

  for (int w : params.workers) {
    ThreadPool pool(w);
    // samples[k][rep]: seconds for stage k (k == n is the whole pipeline).
    std::vector<std::vector<double>> samples(n + 1);
    for (int rep = 0; rep < params.repetitions; ++rep) {
      double previous = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double t = TimeRun(prefixes[k], corpus, pool);
        samples[k - 1].push_back(t - previous);
        previous = t;
        if (k == n) samples[n].push_back(t);
      }
    }
    for (std::size_t k = 0; k <= n; ++k) {
      StageTiming timing;
      if (k < n) {
        timing.stage = pipeline.stages()[k].spec.id;
        timing.type = pipeline.stages()[k].spec.type;
      } else {
        timing.stage = "pipeline";
        timing.type = "pipeline";
      }
      timing.workers = w;
      timing.seconds = samples[k];
      timing.dispersion = Summarize(samples[k]);
      const double median = std::max(timing.dispersion.median, 1e-9);
      timing.docs_per_sec = static_cast<double>(report.docs) / median;
      report.timings.push_back(std::move(timing));
    }
  }

  for (auto &t : report.timings) {
    if (t.workers == 1) {
      t.speedup = 1.0;
      continue;
    }
    const StageTiming &base = report.Find(t.stage, 1);
    t.speedup = base.docs_per_sec > 0.0 ? t.docs_per_sec / base.docs_per_sec : 0.0;
  }
  return report;
}

Json BenchReport::ToJson() const {
  Json rows = Json::array();
  for (const auto &t : timings) {
    rows.push_back({{"stage", t.stage},
                    {"type", t.type},
                    {"workers", t.workers},
                    {"seconds", t.seconds},
                    {"min_s", t.dispersion.min},
                    {"median_s", t.dispersion.median},
                    {"max_s", t.dispersion.max},
                    {"docs_per_sec", t.docs_per_sec},
                    {"speedup", t.speedup}});
  }
  return Json{{"corpus", {{"docs", docs}, {"mean_doc_length", mean_doc_length}}},
              {"repetitions", repetitions},
              {"workers", workers},
              {"hardware_threads", hardware_threads},
              {"timings", rows}};
}

std::string BenchReport::ToCsv() const {
  std::ostringstream out;
  out << "stage,type,workers,min_s,median_s,max_s,docs_per_sec,speedup\n";
  for (const auto &t : timings) {
    out << t.stage << ',' << t.type << ',' << t.workers << ',' << t.dispersion.min << ','
        << t.dispersion.median << ',' << t.dispersion.max << ',' << t.docs_per_sec << ','
        << t.speedup << '\n';
  }
  return out.str();
}

}  // namespace annoflow::parallel
