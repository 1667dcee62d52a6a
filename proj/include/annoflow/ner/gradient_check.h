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

#ifndef ANNOFLOW_NER_GRADIENT_CHECK_H_
#define ANNOFLOW_NER_GRADIENT_CHECK_H_

#include <functional>
#include <span>
#include <string>

#include "annoflow/ner/trainer.h"

namespace annoflow::ner {

struct GradientCheckResult {
  // max over parameters of |a - n| / max(|a|, |n|, 1e-8)
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

// Applied to the analytic gradient before comparison; used to prove the
// check detects a wrong gradient.
using GradientMutation = std::function<void(NerParams &)>;

// Compares the analytic gradient of LossAndGradient with central finite
// differences (L(p + eps) - L(p - eps)) / 2 eps for every parameter. Meant
// for tiny models.
GradientCheckResult GradientCheck(const NerModel &model, std::span<const NerExample> batch,
                                  double epsilon, const GradientMutation &mutation = {});

}  // namespace annoflow::ner

#endif  // ANNOFLOW_NER_GRADIENT_CHECK_H_
