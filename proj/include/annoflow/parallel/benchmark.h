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

#ifndef ANNOFLOW_PARALLEL_BENCHMARK_H_
#define ANNOFLOW_PARALLEL_BENCHMARK_H_

#include <string>
#include <vector>

#include "annoflow/core/jsonl.h"
#include "annoflow/core/pipeline.h"

namespace annoflow::parallel {

struct BenchParams {
  std::vector<int> workers = {1, 2, 4};  // must include 1
  int repetitions = 3;                   // at least 3

  void Validate() const;
};

struct Dispersion {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

Dispersion Summarize(std::vector<double> samples);

// Timing of one stage (or of the whole pipeline) at one worker count.
struct StageTiming {
  std::string stage;  // stage id, or "pipeline" for the full run
  std::string type;
  int workers = 1;
  std::vector<double> seconds;  // one per repetition
  Dispersion dispersion;        // over `seconds`
  double docs_per_sec = 0.0;    // from the median time
  double speedup = 1.0;         // throughput(workers) / throughput(1)
};

struct BenchReport {
  std::size_t docs = 0;
  double mean_doc_length = 0.0;  // bytes
  int repetitions = 0;
  std::vector<int> workers;
  unsigned hardware_threads = 0;
  std::vector<StageTiming> timings;

  // Timing for (stage, workers); throws Error(kInvalidArgument) if absent.
  const StageTiming &Find(const std::string &stage, int workers) const;

  Json ToJson() const;
  // Header line then one row per timing: stage,type,workers,min_s,median_s,
  // max_s,docs_per_sec,speedup.
  std::string ToCsv() const;
};

// Times the pipeline on `corpus` for every worker count. Stage k's time in a
// repetition is the time of the first k stages minus that of the first k-1.
BenchReport Benchmark(const FittedPipeline &pipeline, const Frame &corpus,
                      const BenchParams &params);

}  // namespace annoflow::parallel

#endif  // ANNOFLOW_PARALLEL_BENCHMARK_H_
