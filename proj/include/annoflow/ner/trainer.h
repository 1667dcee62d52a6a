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

#ifndef ANNOFLOW_NER_TRAINER_H_
#define ANNOFLOW_NER_TRAINER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "annoflow/ner/ner_config.h"
#include "annoflow/ner/ner_model.h"

namespace annoflow::ner {

struct LabeledSentence {
  SentenceInput input;
  std::vector<std::string> labels;
};

// A sentence with one target distribution per token over the model labels.
// Hard labels are one-hot rows.
struct NerExample {
  SentenceInput input;
  std::vector<std::vector<double>> targets;
};

// One-hot targets. Throws Error(kInvalidLabel) for labels outside `inventory`.
NerExample MakeExample(const LabeledSentence &sentence,
                       std::span<const std::string> inventory);

// Mean per-token cross-entropy of softmax(scores) against the targets, over
// all tokens of the batch. When `grads` is non-null the analytic gradient
// (shaped like the model params) is added to it. Word vectors are inputs,
// not parameters, and receive no gradient.
double LossAndGradient(const NerModel &model, std::span<const NerExample> batch,
                       NerParams *grads);

// Square root of the summed squares of every gradient entry.
double GlobalNorm(const NerParams &grads);

struct TrainResult {
  NerModel model;
  std::vector<double> loss_trace;  // token-weighted mean loss per epoch
};

// Mini-batch training with global-norm clipping. The inventory comes from
// `config.labels` or, when empty, from the data ("O" first, rest sorted). The
// char vocabulary is every code point seen in training tokens.
//
// Errors: InvalidArgument (empty dataset), InvalidLabel (gold not valid BIO),
// Config, Numeric (NaN/inf loss; message names epoch, batch and grad norm).
TrainResult TrainNer(std::span<const LabeledSentence> data, const NerConfig &config);

// Progress hook called after every epoch with (epoch, mean loss).
using EpochCallback = std::function<void(int, double)>;
TrainResult TrainNer(std::span<const LabeledSentence> data, const NerConfig &config,
                     const EpochCallback &on_epoch);

}  // namespace annoflow::ner

#endif  // ANNOFLOW_NER_TRAINER_H_
