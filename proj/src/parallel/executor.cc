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

#include "annoflow/parallel/executor.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <latch>

#include "annoflow/core/error.h"

namespace annoflow::parallel {

PartitionPlan Partition(std::size_t record_count, int partitions) {
  if (partitions < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition count must be >= 1, got " + std::to_string(partitions));
  }
  const auto p = static_cast<std::size_t>(partitions);
  PartitionPlan plan{record_count, {}};
  const std::size_t base = record_count / p;
  const std::size_t extra = record_count % p;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t size = base + (i < extra ? 1 : 0);
    plan.ranges.push_back({begin, begin + size});
    begin += size;
  }
  return plan;
}

ThreadPool::ThreadPool(int workers) {
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "worker count must be >= 1, got " + std::to_string(workers));
  }
  threads_.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { Loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto &t : threads_) t.join();
}

void ThreadPool::Submit(std::function<void()> task) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    queue_.push_back(std::move(task));
  }
  cv_.notify_one();
}

void ThreadPool::Loop() {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    task();
  }
}

Frame RunParallel(const FittedPipeline &pipeline, const Frame &frame, int workers,
                  std::optional<int> partitions) {
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "worker count must be >= 1, got " + std::to_string(workers));
  }
  if (workers == 1 && !partitions) return pipeline.Transform(frame);
  ThreadPool pool(workers);
  return RunParallel(pipeline, frame, pool, partitions);
}

Frame RunParallel(const FittedPipeline &pipeline, const Frame &frame, ThreadPool &pool,
                  std::optional<int> partitions) {
  const PartitionPlan plan = Partition(frame.size(), partitions.value_or(pool.size()));
  Frame out;
  out.schema = frame.schema;
  for (const auto &[name, kind] : pipeline.OutputSchema()) out.schema.emplace(name, kind);
  out.records.resize(frame.size());

  std::latch done(static_cast<std::ptrdiff_t>(plan.ranges.size()));
  std::vector<std::exception_ptr> failures(plan.ranges.size());
  for (std::size_t p = 0; p < plan.ranges.size(); ++p) {
    pool.Submit([&, p] {
      try {
        const Range r = plan.ranges[p];
        for (std::size_t i = r.begin; i < r.end; ++i) {
          out.records[i] = pipeline.TransformRecord(frame.records[i]);
        }
      } catch (...) {
        failures[p] = std::current_exception();
      }
      done.count_down();
    });
  }
  done.wait();
  for (const auto &f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

int ResolveWorkers(std::optional<int> flag) {
  int workers = 1;
  if (flag) {
    workers = *flag;
  } else if (const char *env = std::getenv("ANNOFLOW_WORKERS"); env && *env) {
    const char *end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, workers);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidArgument, "ANNOFLOW_WORKERS is not an integer", env);
    }
  }
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "worker count must be >= 1, got " + std::to_string(workers));
  }
  return workers;
}

}  // namespace annoflow::parallel
