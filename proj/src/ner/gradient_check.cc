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

#include "annoflow/ner/gradient_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace annoflow::ner {

GradientCheckResult GradientCheck(const NerModel &model, std::span<const NerExample> batch,
                                  double epsilon, const GradientMutation &mutation) {
  NerParams analytic = model.params().ZerosLike();
  LossAndGradient(model, batch, &analytic);
  if (mutation) mutation(analytic);

  std::vector<const Matrix *> grads;
  std::vector<const char *> names;
  analytic.ForEach([&](const char *name, const Matrix &m) {
    grads.push_back(&m);
    names.push_back(name);
  });

  GradientCheckResult result;
  NerModel probe = model;
  std::size_t tensor = 0;
  probe.mutable_params().ForEach([&](const char *, Matrix &m) {
    const Matrix &g = *grads[tensor];
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      const double saved = m.data[i];
      m.data[i] = saved + epsilon;
      const double plus = LossAndGradient(probe, batch, nullptr);
      m.data[i] = saved - epsilon;
      const double minus = LossAndGradient(probe, batch, nullptr);
      m.data[i] = saved;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = g.data[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      ++result.checked;
      if (rel > result.max_relative_error || result.checked == 1) {
        result.max_relative_error = rel;
        result.worst_parameter = names[tensor];
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
    ++tensor;
  });
  return result;
}

}  // namespace annoflow::ner
