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

#ifndef ANNOFLOW_NER_NER_MODEL_H_
#define ANNOFLOW_NER_NER_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annoflow/ner/ner_config.h"

namespace annoflow::ner {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double *row(std::size_t r) const { return data.data() + r * cols; }
  double *row(std::size_t r) { return data.data() + r * cols; }

  bool operator==(const Matrix &) const = default;
};

// One LSTM direction. Gate rows are stacked input, forget, output, cell.
struct LstmParams {
  Matrix input_weights;      // 4h x in
  Matrix recurrent_weights;  // 4h x h
  Matrix bias;               // 4h x 1

  bool operator==(const LstmParams &) const = default;
};

struct NerParams {
  Matrix char_embedding;   // char vocab x char_dim, row 0 is UNK
  Matrix conv_kernel;      // filters x (conv_width * char_dim)
  Matrix conv_bias;        // filters x 1
  LstmParams forward;
  LstmParams backward;
  Matrix projection;       // labels x 2h, forward half first
  Matrix projection_bias;  // labels x 1

  template <typename F>
  void ForEach(F &&fn) {
    fn("char_embedding", char_embedding);
    fn("conv_kernel", conv_kernel);
    fn("conv_bias", conv_bias);
    fn("forward.input_weights", forward.input_weights);
    fn("forward.recurrent_weights", forward.recurrent_weights);
    fn("forward.bias", forward.bias);
    fn("backward.input_weights", backward.input_weights);
    fn("backward.recurrent_weights", backward.recurrent_weights);
    fn("backward.bias", backward.bias);
    fn("projection", projection);
    fn("projection_bias", projection_bias);
  }
  template <typename F>
  void ForEach(F &&fn) const {
    const_cast<NerParams *>(this)->ForEach(
        [&](const char *name, Matrix &m) { fn(name, static_cast<const Matrix &>(m)); });
  }

  // Same shapes, all zeros.
  NerParams ZerosLike() const;
  std::size_t ParameterCount() const;

  bool operator==(const NerParams &) const = default;
};

using ScoreMatrix = std::vector<std::vector<double>>;

// Input for one sentence: tokens and their (frozen) word vectors.
struct SentenceInput {
  std::vector<std::string> tokens;
  std::vector<std::vector<float>> vectors;
};

// Intermediate values kept for backpropagation.
struct ForwardTrace {
  struct CharTrace {
    std::vector<int> ids;     // char vocab ids, padding positions excluded
    std::vector<int> argmax;  // winning position per filter
  };
  struct LstmStep {
    std::vector<double> i, f, o, g, c, h;
  };
  std::vector<std::vector<double>> inputs;  // word vector ++ char features
  std::vector<CharTrace> chars;
  std::vector<LstmStep> forward;   // indexed by token position
  std::vector<LstmStep> backward;  // indexed by token position
  ScoreMatrix scores;
};

// BiLSTM-CNN-Char tagger: per token, a word vector concatenated with a
// max-pooled character convolution feeds a bidirectional LSTM whose states
// are projected to label scores.
class NerModel {
 public:
  NerModel() = default;

  // Seeded initialization: uniform(-r, r), r = sqrt(6 / (rows + cols)) per
  // matrix; biases zero except the forget gate, which starts at 1.
  static NerModel Initialize(const NerConfig &config, std::vector<std::string> labels,
                             std::vector<char32_t> chars, std::size_t word_dim);

  const NerConfig &config() const { return config_; }
  const std::vector<std::string> &labels() const { return labels_; }
  const std::vector<char32_t> &chars() const { return chars_; }
  std::size_t word_dim() const { return word_dim_; }
  const NerParams &params() const { return params_; }
  NerParams &mutable_params() { return params_; }

  // Char vocabulary ids of the first max_word_length code points; 0 = UNK.
  std::vector<int> CharIds(std::string_view token) const;

  // Max-pooled convolution features (length `filters`).
  std::vector<double> CharFeatures(std::string_view token) const;

  // Label score rows, one per token. Throws Error(kConfig) when a word vector
  // has the wrong length.
  ScoreMatrix Forward(const SentenceInput &sentence) const;
  ScoreMatrix Forward(const SentenceInput &sentence, ForwardTrace &trace) const;

  // Forward followed by constrained BIO decoding.
  std::vector<std::string> Predict(const SentenceInput &sentence) const;

  std::vector<std::uint8_t> Serialize() const;
  static NerModel Deserialize(std::span<const std::uint8_t> bytes);

  // Directory with config.json (descriptive) and params.bin (the blob).
  void Save(const std::filesystem::path &dir) const;
  static NerModel Load(const std::filesystem::path &dir);

  bool operator==(const NerModel &other) const;

 private:
  NerConfig config_;
  std::vector<std::string> labels_;
  std::vector<char32_t> chars_;
  std::map<char32_t, int> char_index_;
  std::size_t word_dim_ = 0;
  NerParams params_;
};

}  // namespace annoflow::ner

#endif  // ANNOFLOW_NER_NER_MODEL_H_
