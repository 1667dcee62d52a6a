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

#ifndef ANNOFLOW_ASSERTION_ASSERTION_H_
#define ANNOFLOW_ASSERTION_ASSERTION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annoflow/core/jsonl.h"

namespace annoflow::assertion {

// Declaration order is the class index and the tie-break order.
enum class AssertionLabel {
  kPresent,
  kAbsent,
  kConditional,
  kAssociatedWithSomeoneElse,
};

inline constexpr std::size_t kLabelCount = 4;
inline constexpr std::array<AssertionLabel, kLabelCount> kAllLabels = {
    AssertionLabel::kPresent, AssertionLabel::kAbsent, AssertionLabel::kConditional,
    AssertionLabel::kAssociatedWithSomeoneElse};

std::string_view LabelName(AssertionLabel label);
// Throws Error(kInvalidLabel).
AssertionLabel ParseLabel(std::string_view name);

using Vectors = std::span<const std::vector<float>>;

// Concatenation of three means, each `dim` long: up to `window` tokens left
// of the chunk, the chunk tokens [begin, end] (inclusive), and up to
// `window` tokens right of it. An empty segment contributes zeros.
// Throws Error(kInvalidArgument) when the span is not inside the sentence.
std::vector<double> Featurize(Vectors sentence, std::size_t dim, std::size_t begin,
                              std::size_t end, int window);

struct AssertionConfig {
  int window = 5;
  double learning_rate = 0.5;
  int epochs = 500;
  double init_scale = 0.01;  // weights start uniform in [-init_scale, init_scale]
  std::uint64_t seed = 42;

  void Validate() const;
  static AssertionConfig FromJson(const Json &json);
  Json ToJson() const;
  bool operator==(const AssertionConfig &) const = default;
};

struct AssertionPrediction {
  AssertionLabel label = AssertionLabel::kPresent;
  std::array<double, kLabelCount> probabilities{};
};

// Multinomial logistic regression over Featurize output.
class AssertionModel {
 public:
  AssertionModel() = default;
  // Weights zero, bias zero.
  AssertionModel(std::size_t dim, int window);
  // Weights uniform in [-config.init_scale, config.init_scale] from the seed.
  static AssertionModel Initialize(std::size_t dim, const AssertionConfig &config);

  std::size_t dimension() const { return dim_; }
  int window() const { return window_; }
  std::size_t feature_count() const { return 3 * dim_; }

  // Row-major (3 * dim) x 4.
  std::vector<double> &weights() { return weights_; }
  const std::vector<double> &weights() const { return weights_; }
  std::array<double, kLabelCount> &bias() { return bias_; }
  const std::array<double, kLabelCount> &bias() const { return bias_; }

  std::array<double, kLabelCount> Probabilities(std::span<const double> features) const;
  AssertionPrediction PredictFeatures(std::span<const double> features) const;
  AssertionPrediction Predict(Vectors sentence, std::size_t begin, std::size_t end) const;

  // "ANNOASR1", u32 dim, i32 window, then f64 weights and bias.
  std::vector<std::uint8_t> Serialize() const;
  static AssertionModel Deserialize(std::span<const std::uint8_t> bytes);

  bool operator==(const AssertionModel &) const = default;

 private:
  std::size_t dim_ = 0;
  int window_ = 5;
  std::vector<double> weights_;
  std::array<double, kLabelCount> bias_{};
};

struct AssertionExample {
  std::vector<std::vector<float>> sentence;
  std::size_t chunk_begin = 0;  // token index, inclusive
  std::size_t chunk_end = 0;    // token index, inclusive
  AssertionLabel label = AssertionLabel::kPresent;
};

struct AssertionTrainResult {
  AssertionModel model;
  std::vector<double> loss_trace;     // mean cross-entropy per epoch
  std::vector<std::string> warnings;  // one per label absent from the data
};

// Full-batch gradient descent on mean softmax cross-entropy.
// Errors: InvalidArgument (empty data), Config, Numeric (non-finite loss).
AssertionTrainResult TrainAssertion(std::span<const AssertionExample> data,
                                    const AssertionConfig &config);

// One line of the assertion training format: byte offsets of the chunk,
// inclusive end, into `text`.
struct AssertionRecord {
  std::string text;
  std::size_t chunk_begin = 0;
  std::size_t chunk_end = 0;
  AssertionLabel label = AssertionLabel::kPresent;
};

// Reads {"text", "chunk_begin", "chunk_end", "label"} lines. Blank lines are
// skipped. Errors: Parse (with line), InvalidLabel, InvalidArgument for a
// span outside the text, Io.
std::vector<AssertionRecord> ReadAssertionJsonl(std::istream &in);
std::vector<AssertionRecord> ReadAssertionJsonlFile(const std::filesystem::path &path);

}  // namespace annoflow::assertion

#endif  // ANNOFLOW_ASSERTION_ASSERTION_H_
