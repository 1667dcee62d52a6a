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

#include "annoflow/ner/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "annoflow/core/error.h"
#include "annoflow/eval/bio.h"
#include "annoflow/text/utf8.h"

namespace annoflow::ner {

namespace {

using Step = ForwardTrace::LstmStep;

// Backpropagation through time for one direction. `dh` holds the loss
// gradient w.r.t. each position's hidden state; input gradients are added to
// `dx`.
void BackpropLstm(const LstmParams &p, const std::vector<std::vector<double>> &inputs,
                  const std::vector<Step> &steps, const std::vector<std::vector<double>> &dh,
                  bool reverse, std::size_t h, LstmParams &grad,
                  std::vector<std::vector<double>> &dx) {
  const std::size_t n = inputs.size();
  std::vector<double> dh_next(h, 0.0);
  std::vector<double> dc_next(h, 0.0);
  std::vector<double> da(4 * h);
  const std::vector<double> zeros(h, 0.0);

  // Reverse of the processing order.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? k : n - 1 - k;
    const bool first = reverse ? t == n - 1 : t == 0;
    const Step &s = steps[t];
    const std::vector<double> &c_prev = first ? zeros : steps[reverse ? t + 1 : t - 1].c;
    const std::vector<double> &h_prev = first ? zeros : steps[reverse ? t + 1 : t - 1].h;

    for (std::size_t j = 0; j < h; ++j) {
      const double grad_h = dh[t][j] + dh_next[j];
      const double tc = std::tanh(s.c[j]);
      const double d_o = grad_h * tc;
      const double dc = grad_h * s.o[j] * (1.0 - tc * tc) + dc_next[j];
      const double d_i = dc * s.g[j];
      const double d_g = dc * s.i[j];
      const double d_f = dc * c_prev[j];
      da[j] = d_i * s.i[j] * (1.0 - s.i[j]);
      da[h + j] = d_f * s.f[j] * (1.0 - s.f[j]);
      da[2 * h + j] = d_o * s.o[j] * (1.0 - s.o[j]);
      da[3 * h + j] = d_g * (1.0 - s.g[j] * s.g[j]);
      dc_next[j] = dc * s.f[j];
    }

    const std::vector<double> &x = inputs[t];
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double a = da[r];
      if (a == 0.0) continue;
      grad.bias.data[r] += a;
      double *gw = grad.input_weights.row(r);
      const double *w = p.input_weights.row(r);
      for (std::size_t j = 0; j < x.size(); ++j) {
        gw[j] += a * x[j];
        dx[t][j] += a * w[j];
      }
      double *gu = grad.recurrent_weights.row(r);
      const double *u = p.recurrent_weights.row(r);
      for (std::size_t j = 0; j < h; ++j) {
        gu[j] += a * h_prev[j];
        dh_next[j] += a * u[j];
      }
    }
  }
}

void AddScaled(NerParams &dst, const NerParams &src, double scale) {
  std::vector<Matrix *> targets;
  dst.ForEach([&](const char *, Matrix &m) { targets.push_back(&m); });
  std::size_t i = 0;
  src.ForEach([&](const char *, const Matrix &m) {
    Matrix &t = *targets[i++];
    for (std::size_t j = 0; j < m.data.size(); ++j) t.data[j] += scale * m.data[j];
  });
}

std::vector<Matrix *> Tensors(NerParams &p) {
  std::vector<Matrix *> out;
  p.ForEach([&](const char *, Matrix &m) { out.push_back(&m); });
  return out;
}

}  // namespace

NerExample MakeExample(const LabeledSentence &sentence,
                       std::span<const std::string> inventory) {
  if (sentence.labels.size() != sentence.input.tokens.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and tokens differ in count");
  }
  NerExample example{sentence.input, {}};
  for (const auto &label : sentence.labels) {
    auto it = std::find(inventory.begin(), inventory.end(), label);
    if (it == inventory.end()) {
      throw Error(ErrorCode::kInvalidLabel, "label not in the model inventory", label);
    }
    std::vector<double> row(inventory.size(), 0.0);
    row[static_cast<std::size_t>(it - inventory.begin())] = 1.0;
    example.targets.push_back(std::move(row));
  }
  return example;
}

double LossAndGradient(const NerModel &model, std::span<const NerExample> batch,
                       NerParams *grads) {
  std::size_t total_tokens = 0;
  for (const auto &ex : batch) total_tokens += ex.input.tokens.size();
  if (total_tokens == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(total_tokens);

  const NerConfig &cfg = model.config();
  const NerParams &p = model.params();
  const auto h = static_cast<std::size_t>(cfg.hidden);
  const auto dc = static_cast<std::size_t>(cfg.char_dim);
  const auto w = static_cast<std::size_t>(cfg.conv_width);
  const auto f = static_cast<std::size_t>(cfg.filters);
  const std::size_t labels = model.labels().size();
  const std::size_t word_dim = model.word_dim();

  double loss = 0.0;
  ForwardTrace trace;
  std::vector<double> probs(labels);
  for (const NerExample &ex : batch) {
    const std::size_t n = ex.input.tokens.size();
    if (n == 0) continue;
    if (ex.targets.size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "targets and tokens differ in count");
    }
    model.Forward(ex.input, trace);

    std::vector<std::vector<double>> dh_fwd(n, std::vector<double>(h, 0.0));
    std::vector<std::vector<double>> dh_bwd(n, std::vector<double>(h, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
      const auto &s = trace.scores[t];
      const double top = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (std::size_t l = 0; l < labels; ++l) z += std::exp(s[l] - top);
      const double log_z = top + std::log(z);
      for (std::size_t l = 0; l < labels; ++l) {
        probs[l] = std::exp(s[l] - log_z);
        const double y = ex.targets[t][l];
        if (y != 0.0) loss -= y * (s[l] - log_z) * inv_n;
      }
      if (!grads) continue;
      const auto &hf = trace.forward[t].h;
      const auto &hb = trace.backward[t].h;
      for (std::size_t l = 0; l < labels; ++l) {
        const double ds = (probs[l] - ex.targets[t][l]) * inv_n;
        if (ds == 0.0) continue;
        grads->projection_bias.data[l] += ds;
        double *gp = grads->projection.row(l);
        const double *pr = p.projection.row(l);
        for (std::size_t j = 0; j < h; ++j) {
          gp[j] += ds * hf[j];
          gp[h + j] += ds * hb[j];
          dh_fwd[t][j] += ds * pr[j];
          dh_bwd[t][j] += ds * pr[h + j];
        }
      }
    }
    if (!grads) continue;

    std::vector<std::vector<double>> dx(n, std::vector<double>(word_dim + f, 0.0));
    BackpropLstm(p.forward, trace.inputs, trace.forward, dh_fwd, false, h, grads->forward, dx);
    BackpropLstm(p.backward, trace.inputs, trace.backward, dh_bwd, true, h, grads->backward,
                 dx);

    // Char-CNN: the gradient flows only through each filter's max position.
    for (std::size_t t = 0; t < n; ++t) {
      const auto &ids = trace.chars[t].ids;
      const auto &argmax = trace.chars[t].argmax;
      for (std::size_t k = 0; k < f; ++k) {
        const double g = dx[t][word_dim + k];
        if (g == 0.0) continue;
        grads->conv_bias.data[k] += g;
        const auto pos = static_cast<std::size_t>(argmax[k]);
        double *gk = grads->conv_kernel.row(k);
        const double *kernel = p.conv_kernel.row(k);
        for (std::size_t j = 0; j < w; ++j) {
          const std::size_t q = pos + j;
          if (q >= ids.size()) break;
          const auto id = static_cast<std::size_t>(ids[q]);
          const double *e = p.char_embedding.row(id);
          double *ge = grads->char_embedding.row(id);
          for (std::size_t d = 0; d < dc; ++d) {
            gk[j * dc + d] += g * e[d];
            ge[d] += g * kernel[j * dc + d];
          }
        }
      }
    }
  }
  return loss;
}

double GlobalNorm(const NerParams &grads) {
  double sum = 0.0;
  grads.ForEach([&](const char *, const Matrix &m) {
    for (const double v : m.data) sum += v * v;
  });
  return std::sqrt(sum);
}

TrainResult TrainNer(std::span<const LabeledSentence> data, const NerConfig &config) {
  return TrainNer(data, config, {});
}

TrainResult TrainNer(std::span<const LabeledSentence> data, const NerConfig &config,
                     const EpochCallback &on_epoch) {
  config.Validate();
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty NER training set");

  std::vector<std::string> inventory = config.labels;
  std::set<char32_t> charset;
  std::vector<std::string> seen;
  std::size_t word_dim = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const LabeledSentence &s = data[i];
    if (!eval::IsValidBio(s.labels)) {
      throw Error(ErrorCode::kInvalidLabel,
                  "gold labels of sentence " + std::to_string(i) + " are not valid BIO");
    }
    seen.insert(seen.end(), s.labels.begin(), s.labels.end());
    for (const auto &token : s.input.tokens) {
      std::size_t count = 0;
      for (std::size_t pos = 0;
           pos < token.size() && count < static_cast<std::size_t>(config.max_word_length);
           ++count) {
        const text::CodePoint cp = text::DecodeAt(token, pos);
        charset.insert(cp.value);
        pos += cp.size;
      }
    }
    for (const auto &v : s.input.vectors) {
      if (word_dim == 0) word_dim = v.size();
      if (v.size() != word_dim) {
        throw Error(ErrorCode::kConfig, "inconsistent word vector lengths in training data");
      }
    }
  }
  if (inventory.empty()) inventory = eval::CanonicalInventory(seen);
  if (word_dim == 0) throw Error(ErrorCode::kInvalidArgument, "training data has no tokens");

  TrainResult result{NerModel::Initialize(config, inventory,
                                          std::vector<char32_t>(charset.begin(), charset.end()),
                                          word_dim),
                     {}};
  NerModel &model = result.model;

  std::vector<NerExample> examples;
  examples.reserve(data.size());
  for (const auto &s : data) examples.push_back(MakeExample(s, model.labels()));

  std::mt19937_64 rng(config.seed ^ 0x5eedULL);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  NerParams grads = model.params().ZerosLike();
  NerParams adam_m = grads;
  NerParams adam_v = grads;
  std::uint64_t adam_step = 0;
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with explicit index draws keeps the order platform-stable.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size, ++batch_index) {
      std::vector<NerExample> batch;
      std::size_t tokens = 0;
      for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
        batch.push_back(examples[order[i]]);
        tokens += batch.back().input.tokens.size();
      }
      if (tokens == 0) continue;
      grads = model.params().ZerosLike();
      const double loss = LossAndGradient(model, batch, &grads);
      const double norm = GlobalNorm(grads);
      if (!std::isfinite(loss) || !std::isfinite(norm)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch << ", batch " << batch_index
            << " (loss " << loss << ", grad norm " << norm << ")";
        throw Error(ErrorCode::kNumeric, msg.str());
      }
      const double scale = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      if (config.optimizer == Optimizer::kSgd) {
        AddScaled(model.mutable_params(), grads, -config.learning_rate * scale);
      } else {
        ++adam_step;
        constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_step));
        auto params = Tensors(model.mutable_params());
        auto g = Tensors(grads);
        auto m = Tensors(adam_m);
        auto v = Tensors(adam_v);
        for (std::size_t t = 0; t < params.size(); ++t) {
          for (std::size_t j = 0; j < params[t]->data.size(); ++j) {
            const double gj = g[t]->data[j] * scale;
            double &mj = m[t]->data[j];
            double &vj = v[t]->data[j];
            mj = kBeta1 * mj + (1.0 - kBeta1) * gj;
            vj = kBeta2 * vj + (1.0 - kBeta2) * gj * gj;
            params[t]->data[j] -=
                config.learning_rate * (mj / c1) / (std::sqrt(vj / c2) + kEps);
          }
        }
      }
      epoch_loss += loss * static_cast<double>(tokens);
      epoch_tokens += tokens;
    }
    const double mean = epoch_tokens ? epoch_loss / static_cast<double>(epoch_tokens) : 0.0;
    result.loss_trace.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace annoflow::ner
