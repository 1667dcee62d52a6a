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

#include "annoflow/ner/ner_model.h"

#include <cmath>
#include <fstream>
#include <random>

#include "annoflow/core/binary_io.h"
#include "annoflow/core/error.h"
#include "annoflow/ner/bio_decoder.h"
#include "annoflow/text/utf8.h"

namespace annoflow::ner {

namespace {

constexpr std::string_view kMagic = "ANNONER1";
constexpr std::uint32_t kBlobVersion = 1;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Uniform double in [0, 1) from 53 random bits; identical on every platform.
double Uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

void FillUniform(Matrix &m, std::mt19937_64 &rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  for (double &v : m.data) v = r * (2.0 * Uniform01(rng) - 1.0);
}

LstmParams MakeLstm(std::size_t in, std::size_t h) {
  return LstmParams{Matrix(4 * h, in), Matrix(4 * h, h), Matrix(4 * h, 1)};
}

// Runs one LSTM direction over `inputs`; steps are indexed by position.
std::vector<ForwardTrace::LstmStep> RunLstm(const LstmParams &p,
                                            const std::vector<std::vector<double>> &inputs,
                                            std::size_t h, bool reverse) {
  const std::size_t n = inputs.size();
  std::vector<ForwardTrace::LstmStep> steps(n);
  std::vector<double> pre(4 * h);
  const std::vector<double> zeros(h, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    const std::vector<double> &x = inputs[t];
    const std::vector<double> &h_prev = k == 0 ? zeros : steps[reverse ? t + 1 : t - 1].h;
    const std::vector<double> &c_prev = k == 0 ? zeros : steps[reverse ? t + 1 : t - 1].c;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double acc = p.bias.data[r];
      const double *w = p.input_weights.row(r);
      for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
      const double *u = p.recurrent_weights.row(r);
      for (std::size_t j = 0; j < h; ++j) acc += u[j] * h_prev[j];
      pre[r] = acc;
    }
    ForwardTrace::LstmStep &s = steps[t];
    s.i.resize(h);
    s.f.resize(h);
    s.o.resize(h);
    s.g.resize(h);
    s.c.resize(h);
    s.h.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
      s.i[j] = Sigmoid(pre[j]);
      s.f[j] = Sigmoid(pre[h + j]);
      s.o[j] = Sigmoid(pre[2 * h + j]);
      s.g[j] = std::tanh(pre[3 * h + j]);
      s.c[j] = s.f[j] * c_prev[j] + s.i[j] * s.g[j];
      s.h[j] = s.o[j] * std::tanh(s.c[j]);
    }
  }
  return steps;
}

void WriteMatrix(ByteWriter &w, const char *name, const Matrix &m) {
  w.String(name);
  w.U32(static_cast<std::uint32_t>(m.rows));
  w.U32(static_cast<std::uint32_t>(m.cols));
  for (const double v : m.data) w.F64(v);
}

}  // namespace

NerParams NerParams::ZerosLike() const {
  NerParams z = *this;
  z.ForEach([](const char *, Matrix &m) { std::fill(m.data.begin(), m.data.end(), 0.0); });
  return z;
}

std::size_t NerParams::ParameterCount() const {
  std::size_t n = 0;
  ForEach([&](const char *, const Matrix &m) { n += m.data.size(); });
  return n;
}

NerModel NerModel::Initialize(const NerConfig &config, std::vector<std::string> labels,
                              std::vector<char32_t> chars, std::size_t word_dim) {
  if (word_dim == 0) throw Error(ErrorCode::kConfig, "word vector dimension must be positive");
  if (labels.empty()) throw Error(ErrorCode::kConfig, "empty label inventory");
  NerModel model;
  model.config_ = config;
  model.config_.labels = labels;
  model.config_.Validate();
  model.labels_ = std::move(labels);
  model.chars_ = std::move(chars);
  for (std::size_t i = 0; i < model.chars_.size(); ++i) {
    model.char_index_[model.chars_[i]] = static_cast<int>(i) + 1;
  }
  model.word_dim_ = word_dim;

  const auto dc = static_cast<std::size_t>(config.char_dim);
  const auto w = static_cast<std::size_t>(config.conv_width);
  const auto f = static_cast<std::size_t>(config.filters);
  const auto h = static_cast<std::size_t>(config.hidden);
  const std::size_t in = word_dim + f;

  NerParams &p = model.params_;
  p.char_embedding = Matrix(model.chars_.size() + 1, dc);
  p.conv_kernel = Matrix(f, w * dc);
  p.conv_bias = Matrix(f, 1);
  p.forward = MakeLstm(in, h);
  p.backward = MakeLstm(in, h);
  p.projection = Matrix(model.labels_.size(), 2 * h);
  p.projection_bias = Matrix(model.labels_.size(), 1);

  std::mt19937_64 rng(config.seed);
  FillUniform(p.char_embedding, rng);
  FillUniform(p.conv_kernel, rng);
  for (LstmParams *lstm : {&p.forward, &p.backward}) {
    FillUniform(lstm->input_weights, rng);
    FillUniform(lstm->recurrent_weights, rng);
    for (std::size_t j = 0; j < h; ++j) lstm->bias.data[h + j] = 1.0;
  }
  FillUniform(p.projection, rng);
  return model;
}

std::vector<int> NerModel::CharIds(std::string_view token) const {
  std::vector<int> ids;
  const auto limit = static_cast<std::size_t>(config_.max_word_length);
  for (std::size_t pos = 0; pos < token.size() && ids.size() < limit;) {
    const text::CodePoint cp = text::DecodeAt(token, pos);
    pos += cp.size;
    auto it = char_index_.find(cp.value);
    ids.push_back(it == char_index_.end() ? 0 : it->second);
  }
  return ids;
}

namespace {

std::vector<double> ConvMaxPool(const NerParams &p, const NerConfig &config,
                                const std::vector<int> &ids, std::vector<int> *argmax) {
  const auto dc = static_cast<std::size_t>(config.char_dim);
  const auto w = static_cast<std::size_t>(config.conv_width);
  const auto f = static_cast<std::size_t>(config.filters);
  const std::size_t len = std::max(ids.size(), w);
  const std::size_t positions = len - w + 1;

  std::vector<double> best(f);
  if (argmax) argmax->assign(f, 0);
  for (std::size_t k = 0; k < f; ++k) {
    const double *kernel = p.conv_kernel.row(k);
    for (std::size_t pos = 0; pos < positions; ++pos) {
      double z = p.conv_bias.data[k];
      for (std::size_t j = 0; j < w; ++j) {
        const std::size_t q = pos + j;
        if (q >= ids.size()) break;  // zero padding
        const double *e = p.char_embedding.row(static_cast<std::size_t>(ids[q]));
        const double *kw = kernel + j * dc;
        for (std::size_t d = 0; d < dc; ++d) z += kw[d] * e[d];
      }
      if (pos == 0 || z > best[k]) {
        best[k] = z;
        if (argmax) (*argmax)[k] = static_cast<int>(pos);
      }
    }
  }
  return best;
}

}  // namespace

std::vector<double> NerModel::CharFeatures(std::string_view token) const {
  return ConvMaxPool(params_, config_, CharIds(token), nullptr);
}

ScoreMatrix NerModel::Forward(const SentenceInput &sentence) const {
  ForwardTrace trace;
  return Forward(sentence, trace);
}

ScoreMatrix NerModel::Forward(const SentenceInput &sentence, ForwardTrace &trace) const {
  const std::size_t n = sentence.tokens.size();
  if (sentence.vectors.size() != n) {
    throw Error(ErrorCode::kConfig, "got " + std::to_string(sentence.vectors.size()) +
                                        " word vectors for " + std::to_string(n) + " tokens");
  }
  trace = ForwardTrace{};
  if (n == 0) return {};
  const auto h = static_cast<std::size_t>(config_.hidden);

  trace.inputs.resize(n);
  trace.chars.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto &wv = sentence.vectors[t];
    if (wv.size() != word_dim_) {
      throw Error(ErrorCode::kConfig,
                  "word vector of token '" + sentence.tokens[t] + "' has length " +
                      std::to_string(wv.size()) + ", model expects " +
                      std::to_string(word_dim_));
    }
    trace.chars[t].ids = CharIds(sentence.tokens[t]);
    std::vector<double> features =
        ConvMaxPool(params_, config_, trace.chars[t].ids, &trace.chars[t].argmax);
    std::vector<double> &x = trace.inputs[t];
    x.reserve(word_dim_ + features.size());
    x.assign(wv.begin(), wv.end());
    x.insert(x.end(), features.begin(), features.end());
  }

  trace.forward = RunLstm(params_.forward, trace.inputs, h, false);
  trace.backward = RunLstm(params_.backward, trace.inputs, h, true);

  const std::size_t labels = labels_.size();
  trace.scores.assign(n, std::vector<double>(labels));
  for (std::size_t t = 0; t < n; ++t) {
    const auto &hf = trace.forward[t].h;
    const auto &hb = trace.backward[t].h;
    for (std::size_t l = 0; l < labels; ++l) {
      const double *row = params_.projection.row(l);
      double acc = params_.projection_bias.data[l];
      for (std::size_t j = 0; j < h; ++j) acc += row[j] * hf[j];
      for (std::size_t j = 0; j < h; ++j) acc += row[h + j] * hb[j];
      trace.scores[t][l] = acc;
    }
  }
  return trace.scores;
}

std::vector<std::string> NerModel::Predict(const SentenceInput &sentence) const {
  return DecodeBio(Forward(sentence), labels_);
}

std::vector<std::uint8_t> NerModel::Serialize() const {
  ByteWriter w;
  w.Magic(kMagic);
  w.U32(kBlobVersion);
  const NerConfig &c = config_;
  for (const int v : {c.char_dim, c.conv_width, c.filters, c.hidden, c.max_word_length,
                      c.epochs, c.batch_size}) {
    w.U32(static_cast<std::uint32_t>(v));
  }
  w.F64(c.learning_rate);
  w.F64(c.clip_norm);
  w.F64(c.dropout);
  w.U64(c.seed);
  w.U8(c.optimizer == Optimizer::kSgd ? 0 : 1);
  w.U64(word_dim_);
  w.U32(static_cast<std::uint32_t>(labels_.size()));
  for (const auto &label : labels_) w.String(label);
  w.U32(static_cast<std::uint32_t>(chars_.size()));
  for (const char32_t ch : chars_) w.U32(static_cast<std::uint32_t>(ch));
  std::uint32_t count = 0;
  params_.ForEach([&](const char *, const Matrix &) { ++count; });
  w.U32(count);
  params_.ForEach([&](const char *name, const Matrix &m) { WriteMatrix(w, name, m); });
  return w.Take();
}

NerModel NerModel::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "NER model");
  r.ExpectMagic(kMagic);
  if (const std::uint32_t version = r.U32(); version != kBlobVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "NER blob version " + std::to_string(version), "NER model");
  }
  NerConfig c;
  for (int *v : {&c.char_dim, &c.conv_width, &c.filters, &c.hidden, &c.max_word_length,
                 &c.epochs, &c.batch_size}) {
    *v = static_cast<int>(r.U32());
  }
  c.learning_rate = r.F64();
  c.clip_norm = r.F64();
  c.dropout = r.F64();
  c.seed = r.U64();
  c.optimizer = r.U8() == 0 ? Optimizer::kSgd : Optimizer::kAdam;
  const std::size_t word_dim = r.U64();
  std::vector<std::string> labels(r.U32());
  for (auto &label : labels) label = r.String();
  c.labels = labels;
  std::vector<char32_t> chars(r.U32());
  for (auto &ch : chars) ch = static_cast<char32_t>(r.U32());

  NerModel model = Initialize(c, std::move(labels), std::move(chars), word_dim);
  const std::uint32_t count = r.U32();
  std::uint32_t seen = 0;
  model.params_.ForEach([&](const char *name, Matrix &m) {
    ++seen;
    if (r.String() != name) throw Error(ErrorCode::kParse, "unexpected tensor", name);
    const std::size_t rows = r.U32();
    const std::size_t cols = r.U32();
    if (rows != m.rows || cols != m.cols) {
      throw Error(ErrorCode::kDimensionMismatch, "tensor shape inconsistent with config", name);
    }
    for (double &v : m.data) v = r.F64();
  });
  if (seen != count || !r.AtEnd()) {
    throw Error(ErrorCode::kParse, "tensor count mismatch or trailing bytes", "NER model");
  }
  return model;
}

void NerModel::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  Json config = config_.ToJson();
  config["labels"] = labels_;
  config["word_dim"] = word_dim_;
  config["char_vocab_size"] = chars_.size();
  config["parameter_count"] = params_.ParameterCount();
  std::ofstream out(dir / "config.json");
  if (!out) throw Error(ErrorCode::kIo, "cannot write", (dir / "config.json").string());
  out << config.dump(2) << '\n';
  WriteBinaryFile(dir / "params.bin", Serialize());
}

NerModel NerModel::Load(const std::filesystem::path &dir) {
  return Deserialize(ReadBinaryFile(dir / "params.bin"));
}

bool NerModel::operator==(const NerModel &other) const {
  return labels_ == other.labels_ && chars_ == other.chars_ &&
         word_dim_ == other.word_dim_ && params_ == other.params_ &&
         config_.ToJson() == other.config_.ToJson();
}

}  // namespace annoflow::ner
