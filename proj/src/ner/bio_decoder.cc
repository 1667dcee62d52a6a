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

#include "annoflow/ner/bio_decoder.h"

#include <limits>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"

namespace annoflow::ner {

std::vector<std::size_t> DecodeBioIndices(const std::vector<std::vector<double>> &scores,
                                          std::span<const std::string> inventory) {
  const std::size_t n = scores.size();
  const std::size_t k = inventory.size();
  if (n == 0) return {};
  constexpr double kNeg = -std::numeric_limits<double>::infinity();

  std::vector<char> start(k);
  std::vector<char> allowed(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    start[j] = eval::BioTransitionAllowed("", inventory[j]);
    for (std::size_t i = 0; i < k; ++i) {
      allowed[i * k + j] = eval::BioTransitionAllowed(inventory[i], inventory[j]);
    }
  }

  std::vector<double> best(k, kNeg);
  std::vector<double> next(k);
  std::vector<std::size_t> back(n * k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    if (scores[0].size() != k) {
      throw Error(ErrorCode::kDimensionMismatch, "score row width differs from inventory");
    }
    if (start[j]) best[j] = scores[0][j];
  }
  for (std::size_t t = 1; t < n; ++t) {
    if (scores[t].size() != k) {
      throw Error(ErrorCode::kDimensionMismatch, "score row width differs from inventory");
    }
    for (std::size_t j = 0; j < k; ++j) {
      double top = kNeg;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (!allowed[i * k + j] || best[i] == kNeg) continue;
        if (top == kNeg || best[i] > top) {
          top = best[i];
          arg = i;
        }
      }
      next[j] = top == kNeg ? kNeg : top + scores[t][j];
      back[t * k + j] = arg;
    }
    best.swap(next);
  }

  std::size_t last = k;
  for (std::size_t j = 0; j < k; ++j) {
    if (best[j] == kNeg) continue;
    if (last == k || best[j] > best[last]) last = j;
  }
  if (last == k) {
    throw Error(ErrorCode::kConfig, "label inventory admits no valid BIO sequence");
  }
  std::vector<std::size_t> path(n);
  path[n - 1] = last;
  for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = back[t * k + path[t]];
  return path;
}

std::vector<std::string> DecodeBio(const std::vector<std::vector<double>> &scores,
                                   std::span<const std::string> inventory) {
  std::vector<std::string> out;
  for (const std::size_t i : DecodeBioIndices(scores, inventory)) out.push_back(inventory[i]);
  return out;
}

}  // namespace annoflow::ner
