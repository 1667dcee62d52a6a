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

#include "annoflow/assertion/assertion.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "annoflow/core/binary_io.h"
#include "annoflow/core/error.h"

namespace annoflow::assertion {

namespace {

constexpr std::array<std::string_view, kLabelCount> kNames = {
    "present", "absent", "conditional", "associated_with_someone_else"};

double Uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

void AddMean(Vectors sentence, std::size_t from, std::size_t to, std::size_t dim,
             double *out) {
  if (from >= to) return;
  for (std::size_t t = from; t < to; ++t) {
    if (sentence[t].size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "token vector has length " + std::to_string(sentence[t].size()) +
                      ", expected " + std::to_string(dim));
    }
    for (std::size_t d = 0; d < dim; ++d) out[d] += sentence[t][d];
  }
  const double inv = 1.0 / static_cast<double>(to - from);
  for (std::size_t d = 0; d < dim; ++d) out[d] *= inv;
}

}  // namespace

std::string_view LabelName(AssertionLabel label) {
  return kNames[static_cast<std::size_t>(label)];
}

AssertionLabel ParseLabel(std::string_view name) {
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    if (kNames[i] == name) return kAllLabels[i];
  }
  throw Error(ErrorCode::kInvalidLabel, "unknown assertion label", std::string(name));
}

std::vector<double> Featurize(Vectors sentence, std::size_t dim, std::size_t begin,
                              std::size_t end, int window) {
  if (begin > end || end >= sentence.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "chunk tokens [" + std::to_string(begin) + ", " + std::to_string(end) +
                    "] outside a sentence of " + std::to_string(sentence.size()) + " tokens");
  }
  if (window < 0) throw Error(ErrorCode::kConfig, "window must be >= 0");
  const auto k = static_cast<std::size_t>(window);
  std::vector<double> out(3 * dim, 0.0);
  AddMean(sentence, begin - std::min(begin, k), begin, dim, out.data());
  AddMean(sentence, begin, end + 1, dim, out.data() + dim);
  AddMean(sentence, end + 1, std::min(sentence.size(), end + 1 + k), dim, out.data() + 2 * dim);
  return out;
}

void AssertionConfig::Validate() const {
  if (window < 0) throw Error(ErrorCode::kConfig, "window must be >= 0");
  if (epochs < 0) throw Error(ErrorCode::kConfig, "epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfig, "learning_rate must be positive");
  if (!(init_scale >= 0.0)) throw Error(ErrorCode::kConfig, "init_scale must be >= 0");
}

AssertionConfig AssertionConfig::FromJson(const Json &json) {
  AssertionConfig c;
  try {
    c.window = json.value("window", c.window);
    c.learning_rate = json.value("learning_rate", c.learning_rate);
    c.epochs = json.value("epochs", c.epochs);
    c.init_scale = json.value("init_scale", c.init_scale);
    c.seed = json.value("seed", c.seed);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("bad assertion config: ") + e.what());
  }
  c.Validate();
  return c;
}

Json AssertionConfig::ToJson() const {
  return Json{{"window", window},
              {"learning_rate", learning_rate},
              {"epochs", epochs},
              {"init_scale", init_scale},
              {"seed", seed}};
}

AssertionModel::AssertionModel(std::size_t dim, int window)
    : dim_(dim), window_(window), weights_(3 * dim * kLabelCount, 0.0) {}

AssertionModel AssertionModel::Initialize(std::size_t dim, const AssertionConfig &config) {
  config.Validate();
  AssertionModel model(dim, config.window);
  std::mt19937_64 rng(config.seed);
  for (double &w : model.weights_) w = config.init_scale * (2.0 * Uniform01(rng) - 1.0);
  return model;
}

std::array<double, kLabelCount> AssertionModel::Probabilities(
    std::span<const double> features) const {
  if (features.size() != feature_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "assertion features have length " + std::to_string(features.size()) +
                    ", model expects " + std::to_string(feature_count()));
  }
  std::array<double, kLabelCount> z = bias_;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double x = features[j];
    if (x == 0.0) continue;
    const double *row = weights_.data() + j * kLabelCount;
    for (std::size_t c = 0; c < kLabelCount; ++c) z[c] += x * row[c];
  }
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double &v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double &v : z) v /= sum;
  return z;
}

AssertionPrediction AssertionModel::PredictFeatures(std::span<const double> features) const {
  AssertionPrediction out;
  out.probabilities = Probabilities(features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kLabelCount; ++c) {
    if (out.probabilities[c] > out.probabilities[best]) best = c;
  }
  out.label = kAllLabels[best];
  return out;
}

AssertionPrediction AssertionModel::Predict(Vectors sentence, std::size_t begin,
                                            std::size_t end) const {
  return PredictFeatures(Featurize(sentence, dim_, begin, end, window_));
}

std::vector<std::uint8_t> AssertionModel::Serialize() const {
  ByteWriter w;
  w.Magic("ANNOASR1");
  w.U32(static_cast<std::uint32_t>(dim_));
  w.U32(static_cast<std::uint32_t>(window_));
  for (const double v : weights_) w.F64(v);
  for (const double v : bias_) w.F64(v);
  return w.Take();
}

AssertionModel AssertionModel::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "assertion model");
  r.ExpectMagic("ANNOASR1");
  const std::uint32_t dim = r.U32();
  const auto window = static_cast<std::int32_t>(r.U32());
  if (window < 0) throw Error(ErrorCode::kParse, "negative window in assertion model");
  if (r.remaining() != (3ull * dim * kLabelCount + kLabelCount) * 8) {
    throw Error(ErrorCode::kParse, "assertion model blob has the wrong size");
  }
  AssertionModel model(dim, window);
  for (double &v : model.weights_) v = r.F64();
  for (double &v : model.bias_) v = r.F64();
  return model;
}

AssertionTrainResult TrainAssertion(std::span<const AssertionExample> data,
                                    const AssertionConfig &config) {
  config.Validate();
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty assertion training set");

  std::size_t dim = 0;
  bool dim_known = false;
  for (const auto &ex : data) {
    for (const auto &v : ex.sentence) {
      if (!dim_known) {
        dim = v.size();
        dim_known = true;
      } else if (v.size() != dim) {
        throw Error(ErrorCode::kConfig, "inconsistent word vector lengths in training data");
      }
    }
  }

  AssertionTrainResult result{AssertionModel::Initialize(dim, config), {}, {}};
  AssertionModel &model = result.model;

  std::array<std::size_t, kLabelCount> counts{};
  std::vector<std::vector<double>> features;
  features.reserve(data.size());
  for (const auto &ex : data) {
    features.push_back(Featurize(ex.sentence, dim, ex.chunk_begin, ex.chunk_end, config.window));
    ++counts[static_cast<std::size_t>(ex.label)];
  }
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    if (counts[c] == 0) {
      result.warnings.push_back("no training examples for label '" +
                                std::string(kNames[c]) + "'");
    }
  }

  const double inv_n = 1.0 / static_cast<double>(data.size());
  std::vector<double> grad_w(model.weights().size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::array<double, kLabelCount> grad_b{};
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto probs = model.Probabilities(features[i]);
      const auto gold = static_cast<std::size_t>(data[i].label);
      loss -= std::log(probs[gold]) * inv_n;
      std::array<double, kLabelCount> delta{};
      for (std::size_t c = 0; c < kLabelCount; ++c) {
        delta[c] = (probs[c] - (c == gold ? 1.0 : 0.0)) * inv_n;
        grad_b[c] += delta[c];
      }
      const auto &x = features[i];
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] == 0.0) continue;
        double *g = grad_w.data() + j * kLabelCount;
        for (std::size_t c = 0; c < kLabelCount; ++c) g[c] += x[j] * delta[c];
      }
    }
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite assertion loss at epoch " << epoch << " (loss " << loss << ")";
      throw Error(ErrorCode::kNumeric, msg.str());
    }
    result.loss_trace.push_back(loss);
    for (std::size_t j = 0; j < grad_w.size(); ++j) {
      model.weights()[j] -= config.learning_rate * grad_w[j];
    }
    for (std::size_t c = 0; c < kLabelCount; ++c) {
      model.bias()[c] -= config.learning_rate * grad_b[c];
    }
  }
  return result;
}

std::vector<AssertionRecord> ReadAssertionJsonl(std::istream &in) {
  std::vector<AssertionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AssertionRecord rec;
    std::string label;
    try {
      const Json j = Json::parse(line);
      rec.text = j.at("text").get<std::string>();
      rec.chunk_begin = j.at("chunk_begin").get<std::size_t>();
      rec.chunk_end = j.at("chunk_end").get<std::size_t>();
      label = j.at("label").get<std::string>();
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kParse, e.what(), "assertion data", line_no);
    }
    try {
      rec.label = ParseLabel(label);
    } catch (const Error &e) {
      throw Error(ErrorCode::kInvalidLabel, "unknown assertion label", label, line_no);
    }
    if (rec.chunk_begin > rec.chunk_end || rec.chunk_end >= rec.text.size()) {
      throw Error(ErrorCode::kInvalidArgument, "chunk span outside the text", "assertion data",
                  line_no);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AssertionRecord> ReadAssertionJsonlFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open", path.string());
  return ReadAssertionJsonl(in);
}

}  // namespace annoflow::assertion
