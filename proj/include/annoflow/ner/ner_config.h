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

#ifndef ANNOFLOW_NER_NER_CONFIG_H_
#define ANNOFLOW_NER_NER_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "annoflow/core/jsonl.h"

namespace annoflow::ner {

enum class Optimizer { kSgd, kAdam };

struct NerConfig {
  int char_dim = 16;
  int conv_width = 3;
  int filters = 25;
  int hidden = 64;  // per direction
  int max_word_length = 30;
  // BIO inventory. Empty means "take it from the training data".
  std::vector<std::string> labels;

  double learning_rate = 0.05;
  int epochs = 30;
  int batch_size = 8;
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
  Optimizer optimizer = Optimizer::kSgd;
  // Reserved; training rejects non-zero values.
  double dropout = 0.0;

  // Throws Error(kConfig) on non-positive dimensions or a bad inventory.
  void Validate() const;

  static NerConfig FromJson(const Json &json);
  Json ToJson() const;
};

}  // namespace annoflow::ner

#endif  // ANNOFLOW_NER_NER_CONFIG_H_
