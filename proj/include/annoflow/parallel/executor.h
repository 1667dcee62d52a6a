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

#ifndef ANNOFLOW_PARALLEL_EXECUTOR_H_
#define ANNOFLOW_PARALLEL_EXECUTOR_H_

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "annoflow/core/pipeline.h"

namespace annoflow::parallel {

// Half-open record index range.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Range &) const = default;
};

struct PartitionPlan {
  std::size_t record_count = 0;
  std::vector<Range> ranges;  // contiguous, in order, sizes differ by at most 1
};

// Throws Error(kInvalidArgument) when `partitions` < 1.
PartitionPlan Partition(std::size_t record_count, int partitions);

// Fixed-size worker pool with a FIFO task queue.
class ThreadPool {
 public:
  // Throws Error(kInvalidArgument) when `workers` < 1.
  explicit ThreadPool(int workers);
  ~ThreadPool();
  ThreadPool(const ThreadPool &) = delete;
  ThreadPool &operator=(const ThreadPool &) = delete;

  int size() const { return static_cast<int>(threads_.size()); }
  void Submit(std::function<void()> task);

 private:
  void Loop();

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

// Transforms `frame` with `workers` threads, one partition per worker unless
// `partitions` is given. The output equals pipeline.Transform(frame).
Frame RunParallel(const FittedPipeline &pipeline, const Frame &frame, int workers,
                  std::optional<int> partitions = std::nullopt);

// Same, on an existing pool. The calling thread blocks until all partitions
// are done.
Frame RunParallel(const FittedPipeline &pipeline, const Frame &frame, ThreadPool &pool,
                  std::optional<int> partitions = std::nullopt);

// Worker count: `flag` when set, otherwise ANNOFLOW_WORKERS, otherwise 1.
// Throws Error(kInvalidArgument) for a value < 1 or a malformed variable.
int ResolveWorkers(std::optional<int> flag);

}  // namespace annoflow::parallel

#endif  // ANNOFLOW_PARALLEL_EXECUTOR_H_
