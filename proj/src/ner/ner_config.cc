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

#include "annoflow/ner/ner_config.h"

#include <algorithm>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"

namespace annoflow::ner {

void NerConfig::Validate() const {
  if (char_dim <= 0 || conv_width <= 0 || filters <= 0 || hidden <= 0 ||
      max_word_length <= 0) {
    throw Error(ErrorCode::kConfig, "NER dimensions must be positive");
  }
  if (epochs < 0 || batch_size <= 0) {
    throw Error(ErrorCode::kConfig, "epochs must be >= 0 and batch_size > 0");
  }
  if (!(learning_rate > 0.0) || !(clip_norm > 0.0)) {
    throw Error(ErrorCode::kConfig, "learning_rate and clip_norm must be positive");
  }
  if (dropout != 0.0) {
    throw Error(ErrorCode::kConfig, "dropout is reserved and must be 0");
  }
  if (!labels.empty()) {
    if (std::find(labels.begin(), labels.end(), eval::kOutside) == labels.end()) {
      throw Error(ErrorCode::kConfig, "label inventory must contain \"O\"");
    }
    for (const auto &label : labels) {
      if (!eval::ParseBio(label)) {
        throw Error(ErrorCode::kInvalidLabel, "not a BIO tag", label);
      }
    }
  }
}

NerConfig NerConfig::FromJson(const Json &json) {
  NerConfig c;
  try {
    c.char_dim = json.value("char_dim", c.char_dim);
    c.conv_width = json.value("conv_width", c.conv_width);
    c.filters = json.value("filters", c.filters);
    c.hidden = json.value("hidden", c.hidden);
    c.max_word_length = json.value("max_word_length", c.max_word_length);
    if (json.contains("labels")) c.labels = json["labels"].get<std::vector<std::string>>();
    c.learning_rate = json.value("learning_rate", c.learning_rate);
    c.epochs = json.value("epochs", c.epochs);
    c.batch_size = json.value("batch_size", c.batch_size);
    c.clip_norm = json.value("clip_norm", c.clip_norm);
    c.seed = json.value("seed", c.seed);
    const std::string optimizer = json.value("optimizer", std::string("sgd"));
    if (optimizer == "sgd") {
      c.optimizer = Optimizer::kSgd;
    } else if (optimizer == "adam") {
      c.optimizer = Optimizer::kAdam;
    } else {
      throw Error(ErrorCode::kConfig, "optimizer must be \"sgd\" or \"adam\"", optimizer);
    }
    c.dropout = json.value("dropout", c.dropout);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("bad NER config: ") + e.what());
  }
  c.Validate();
  return c;
}

Json NerConfig::ToJson() const {
  return Json{{"char_dim", char_dim},
              {"conv_width", conv_width},
              {"filters", filters},
              {"hidden", hidden},
              {"max_word_length", max_word_length},
              {"labels", labels},
              {"learning_rate", learning_rate},
              {"epochs", epochs},
              {"batch_size", batch_size},
              {"clip_norm", clip_norm},
              {"seed", seed},
              {"optimizer", optimizer == Optimizer::kSgd ? "sgd" : "adam"},
              {"dropout", dropout}};
}

}  // namespace annoflow::ner
