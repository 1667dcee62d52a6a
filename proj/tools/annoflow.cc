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

// annoflow command line: train, annotate, evaluate, benchmark and serve.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "annoflow/assertion/assertion.h"
#include "annoflow/core/error.h"
#include "annoflow/core/jsonl.h"
#include "annoflow/core/pipeline.h"
#include "annoflow/embeddings/embedding_table.h"
#include "annoflow/eval/conll.h"
#include "annoflow/parallel/benchmark.h"
#include "annoflow/parallel/executor.h"
#include "annoflow/parallel/synthetic.h"
#include "annoflow/stages/workflows.h"
#include "annoflow/store/model_store.h"

namespace fs = std::filesystem;
using namespace annoflow;

namespace {

enum Exit : int {
  kOk = 0,
  kArgs = 2,
  kLoad = 3,
  kIo = 4,
  kNumeric = 5,
  kAlignment = 6,
};

int ExitFor(const Error &e) {
  switch (e.code()) {
    case ErrorCode::kIo: return kIo;
    case ErrorCode::kNumeric: return kNumeric;
    case ErrorCode::kAlignment: return kAlignment;
    default: return kArgs;
  }
}

int Fail(int code, const std::string &message) {
  std::cerr << "annoflow: " << message << "\n";
  return code;
}

// Runs `body`, mapping errors to exit codes.
template <typename F>
int Guard(F &&body) {
  try {
    return body();
  } catch (const Error &e) {
    return Fail(ExitFor(e), e.what());
  } catch (const std::exception &e) {
    return Fail(kArgs, e.what());
  }
}

// A pipeline directory, or a registry entry name.
FittedPipeline LoadOrExit(const std::string &pipeline, const std::string &registry, int &code) {
  fs::path dir = pipeline;
  if (!fs::exists(dir / store::kManifestName)) {
    if (auto root = store::ResolveRegistry(registry);
        root && fs::exists(*root / pipeline / store::kManifestName)) {
      dir = *root / pipeline;
    }
  }
  try {
    code = kOk;
    return store::LoadPipeline(dir);
  } catch (const std::exception &e) {
    code = Fail(kLoad, std::string("cannot load pipeline '") + pipeline + "': " + e.what());
    return {};
  }
}

void WriteJsonFile(const fs::path &path, const Json &json) {
  std::ofstream out(path, std::ios::binary);
  out << json.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, "cannot write", path.string());
}

// ---- annotate --------------------------------------------------------------

struct AnnotateOptions {
  std::string pipeline;
  std::string input;
  std::string output;
  std::optional<int> workers;
  std::string registry;
};

int CmdAnnotate(const AnnotateOptions &o) {
  int code = kOk;
  const FittedPipeline pipeline = LoadOrExit(o.pipeline, o.registry, code);
  if (code != kOk) return code;
  return Guard([&] {
    const int workers = parallel::ResolveWorkers(o.workers);
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open input", o.input);
    const Frame frame = ReadFrame(in);

    const auto start = std::chrono::steady_clock::now();
    const Frame out = parallel::RunParallel(pipeline, frame, workers);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream dst(o.output, std::ios::binary);
    if (!dst) throw Error(ErrorCode::kIo, "cannot open output", o.output);
    WriteFrame(out, dst);
    if (!dst) throw Error(ErrorCode::kIo, "write failed", o.output);

    std::size_t errors = 0;
    for (const auto &r : out.records) errors += r.error ? 1 : 0;
    std::fprintf(stderr, "annotated %zu docs (%zu with errors) in %.3f s, %.1f docs/sec, %d workers\n",
                 out.size(), errors, seconds,
                 seconds > 0 ? static_cast<double>(out.size()) / seconds : 0.0, workers);
    return static_cast<int>(kOk);
  });
}

// ---- train-ner -------------------------------------------------------------

struct TrainNerOptions {
  std::string conll;
  std::string dev;
  std::string embeddings;
  std::string output;
  std::string loss_trace;
  bool force = false;
  bool quiet = false;
  std::uint64_t seed = 42;
  ner::NerConfig config;
  std::string optimizer = "sgd";
};

int CmdTrainNer(TrainNerOptions o) {
  return Guard([&] {
    o.config.seed = o.seed;
    if (o.optimizer == "adam") {
      o.config.optimizer = ner::Optimizer::kAdam;
    } else if (o.optimizer != "sgd") {
      throw Error(ErrorCode::kConfig, "optimizer must be sgd or adam", o.optimizer);
    }
    o.config.Validate();
    if (fs::exists(o.output) && !fs::is_empty(o.output) && !o.force) {
      throw Error(ErrorCode::kDirectoryNotEmpty,
                  "refusing to overwrite a non-empty directory without --force", o.output);
    }
    eval::ConllDataset data = eval::ReadConllFile(o.conll);
    if (!o.dev.empty()) data = eval::MergeDatasets(data, eval::ReadConllFile(o.dev));
    if (data.sentences.empty()) throw Error(ErrorCode::kInvalidArgument, "no training sentences");
    const auto table = embeddings::LoadGlove(o.embeddings);

    const auto run = stages::TrainNerPipeline(data, table, o.config, [&](int epoch, double loss) {
      if (!o.quiet) std::fprintf(stderr, "epoch %d loss %.6f\n", epoch + 1, loss);
    });
    const Json info{{"command", "train-ner"}, {"seed", o.seed}};
    store::SavePipeline(run.pipeline, o.output, o.force, info);
    const fs::path trace_path =
        o.loss_trace.empty() ? fs::path(o.output) / "loss_trace.json" : fs::path(o.loss_trace);
    WriteJsonFile(trace_path, Json{{"seed", o.seed}, {"loss", run.loss_trace}});

    const Json summary{{"seed", o.seed},
                       {"sentences", run.sentences},
                       {"tokens", run.tokens},
                       {"iob1_conversions", data.iob1_conversions},
                       {"labels", data.inventory},
                       {"embedding_coverage", run.coverage.coverage_ratio},
                       {"final_loss", run.loss_trace.empty() ? Json(nullptr)
                                                             : Json(run.loss_trace.back())},
                       {"pipeline", o.output}};
    std::cout << summary.dump() << "\n";
    return static_cast<int>(kOk);
  });
}

// ---- train-assertion -------------------------------------------------------

struct TrainAssertionOptions {
  std::string data;
  std::string embeddings;
  std::string output;
  bool force = false;
  std::uint64_t seed = 42;
  assertion::AssertionConfig config;
};

int CmdTrainAssertion(TrainAssertionOptions o) {
  return Guard([&] {
    o.config.seed = o.seed;
    o.config.Validate();
    if (fs::exists(o.output) && !fs::is_empty(o.output) && !o.force) {
      throw Error(ErrorCode::kDirectoryNotEmpty,
                  "refusing to overwrite a non-empty directory without --force", o.output);
    }
    const auto records = assertion::ReadAssertionJsonlFile(o.data);
    if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "no training examples");
    const auto table = embeddings::LoadGlove(o.embeddings);
    const auto run = stages::TrainAssertionPipeline(records, table, o.config);
    for (const auto &w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    store::SavePipeline(run.pipeline, o.output, o.force,
                        Json{{"command", "train-assertion"}, {"seed", o.seed}});
    WriteJsonFile(fs::path(o.output) / "loss_trace.json",
                  Json{{"seed", o.seed}, {"loss", run.loss_trace}});
    std::cout << Json{{"seed", o.seed},
                      {"examples", run.examples},
                      {"warnings", run.warnings},
                      {"final_loss", run.loss_trace.empty() ? Json(nullptr)
                                                            : Json(run.loss_trace.back())},
                      {"pipeline", o.output}}
                     .dump()
              << "\n";
    return static_cast<int>(kOk);
  });
}

// ---- fit -------------------------------------------------------------------

struct FitOptions {
  std::string spec;
  std::string input;
  std::string conll;
  std::string output;
  bool force = false;
  std::uint64_t seed = 42;
};

int CmdFit(const FitOptions &o) {
  return Guard([&] {
    std::ifstream spec_in(o.spec, std::ios::binary);
    if (!spec_in) throw Error(ErrorCode::kIo, "cannot open spec", o.spec);
    Json spec_json;
    try {
      spec_json = Json::parse(spec_in);
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kParse, e.what(), o.spec);
    }
    auto specs = PipelineSpecFromJson(spec_json);
    // Estimators without an explicit seed take the command seed.
    for (auto &s : specs) {
      if (DefaultRegistry().Has(s.type) && DefaultRegistry().Get(s.type).estimator &&
          !s.params.contains("seed")) {
        s.params["seed"] = o.seed;
      }
    }
    Frame frame;
    if (!o.conll.empty()) {
      frame = eval::ConllToFrame(eval::ReadConllFile(o.conll), true);
    } else if (!o.input.empty()) {
      frame = ReadFrameFile(o.input);
    }
    const FittedPipeline pipeline = PipelineFit(specs, frame);
    const auto manifest = store::SavePipeline(pipeline, o.output, o.force,
                                              Json{{"command", "fit"}, {"seed", o.seed}});
    std::cout << Json{{"seed", o.seed}, {"stages", pipeline.size()},
                      {"manifest", manifest.string()}}
                     .dump()
              << "\n";
    return static_cast<int>(kOk);
  });
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOptions {
  std::string pipeline;
  std::string conll;
  std::string registry;
  std::string mode = "chunk";
  std::string report;
  bool retokenize = false;
  std::optional<int> workers;
};

int CmdEvaluate(const EvaluateOptions &o) {
  int code = kOk;
  const FittedPipeline pipeline = LoadOrExit(o.pipeline, o.registry, code);
  if (code != kOk) return code;
  return Guard([&] {
    eval::ScoreMode mode;
    if (o.mode == "chunk") {
      mode = eval::ScoreMode::kChunk;
    } else if (o.mode == "token") {
      mode = eval::ScoreMode::kTokenExcludingO;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "mode must be chunk or token", o.mode);
    }
    const auto data = eval::ReadConllFile(o.conll);
    const auto run = stages::EvaluatePipeline(pipeline, data, mode, o.retokenize,
                                              parallel::ResolveWorkers(o.workers));
    Json json = run.report.ToJson();
    json["sentences"] = run.sentences;
    json["tokens"] = run.tokens;
    json["iob1_conversions"] = data.iob1_conversions;
    std::cout << json.dump() << "\n" << run.report.ToTable();
    if (!o.report.empty()) WriteJsonFile(o.report, json);
    return static_cast<int>(kOk);
  });
}

// ---- benchmark -------------------------------------------------------------

struct BenchmarkOptions {
  std::string pipeline;
  std::string registry;
  std::size_t docs = 1000;
  int min_sentences = 1;
  int max_sentences = 8;
  bool noise = false;
  std::vector<int> workers = {1, 2, 4};
  int repetitions = 3;
  std::uint64_t seed = 42;
  std::string json_path;
  std::string csv_path;
};

int CmdBenchmark(const BenchmarkOptions &o) {
  FittedPipeline pipeline;
  if (!o.pipeline.empty()) {
    int code = kOk;
    pipeline = LoadOrExit(o.pipeline, o.registry, code);
    if (code != kOk) return code;
  }
  return Guard([&] {
    if (o.pipeline.empty()) pipeline = PipelineFit(stages::RuleStageSpecs(), Frame{});
    parallel::CorpusParams params;
    params.docs = o.docs;
    params.min_sentences = o.min_sentences;
    params.max_sentences = o.max_sentences;
    params.seed = o.seed;
    params.noise = o.noise;
    const Frame corpus = parallel::SyntheticCorpus(params);
    const auto report = parallel::Benchmark(pipeline, corpus, {o.workers, o.repetitions});
    Json json = report.ToJson();
    json["seed"] = o.seed;
    std::cout << json.dump(2) << "\n";
    if (!o.json_path.empty()) WriteJsonFile(o.json_path, json);
    const std::string csv = report.ToCsv();
    if (!o.csv_path.empty()) {
      std::ofstream out(o.csv_path, std::ios::binary);
      out << csv;
      if (!out) throw Error(ErrorCode::kIo, "cannot write", o.csv_path);
    } else {
      std::cerr << csv;
    }
    return static_cast<int>(kOk);
  });
}

// ---- serve -----------------------------------------------------------------

struct ServeOptions {
  std::string pipeline;
  std::string registry;
  std::optional<int> workers;
};

Json HandleRequest(const FittedPipeline &pipeline, const std::string &line) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::exception &e) {
    return Json{{"id", nullptr}, {"error", std::string("malformed request: ") + e.what()}};
  }
  if (!request.is_object()) {
    return Json{{"id", nullptr}, {"error", "request must be a JSON object"}};
  }
  const Json id = request.contains("id") ? request["id"] : Json(nullptr);
  try {
    const std::string op = request.value("op", std::string());
    if (op == "ping") return Json{{"id", id}, {"result", "pong"}};
    if (op == "annotate") {
      DocumentRecord record = RecordFromJson(request.at("record"));
      return Json{{"id", id}, {"result", RecordToJson(pipeline.TransformRecord(record))}};
    }
    return Json{{"id", id}, {"error", "unknown op '" + op + "'"}};
  } catch (const std::exception &e) {
    return Json{{"id", id}, {"error", e.what()}};
  }
}

int CmdServe(const ServeOptions &o) {
  int code = kOk;
  const FittedPipeline pipeline = LoadOrExit(o.pipeline, o.registry, code);
  if (code != kOk) return code;
  return Guard([&] {
    std::mutex out_mu;
    {
      parallel::ThreadPool pool(parallel::ResolveWorkers(o.workers));
      std::string line;
      while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        pool.Submit([&pipeline, &out_mu, line] {
          const std::string response = HandleRequest(pipeline, line).dump();
          std::lock_guard<std::mutex> lock(out_mu);
          std::cout << response << '\n' << std::flush;
        });
      }
    }  // the pool drains its queue before joining
    return static_cast<int>(kOk);
  });
}

// ---- registry --------------------------------------------------------------

int CmdRegistryList(const std::string &flag) {
  return Guard([&] {
    const auto root = store::ResolveRegistry(flag);
    if (!root) throw Error(ErrorCode::kInvalidArgument, "no registry: pass --registry or set ANNOFLOW_REGISTRY");
    if (!fs::is_directory(*root)) throw Error(ErrorCode::kIo, "registry root not found", root->string());
    Json out = Json::array();
    for (const auto &e : store::RegistryList(*root)) {
      Json entry{{"name", e.name}, {"path", e.path.string()}, {"summary", e.summary}};
      if (e.error) entry["error"] = *e.error;
      out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << "\n";
    return static_cast<int>(kOk);
  });
}

void AddNerFlags(CLI::App *cmd, TrainNerOptions &o) {
  auto &c = o.config;
  c.epochs = 30;
  cmd->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--learning-rate", c.learning_rate)->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size)->capture_default_str();
  cmd->add_option("--clip-norm", c.clip_norm)->capture_default_str();
  cmd->add_option("--char-dim", c.char_dim)->capture_default_str();
  cmd->add_option("--conv-width", c.conv_width)->capture_default_str();
  cmd->add_option("--filters", c.filters)->capture_default_str();
  cmd->add_option("--hidden", c.hidden)->capture_default_str();
  cmd->add_option("--max-word-length", c.max_word_length)->capture_default_str();
  cmd->add_option("--optimizer", o.optimizer, "sgd or adam")->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"annoflow: annotation pipelines for clinical text"};
  app.require_subcommand(1);
  std::function<int()> run;

  AnnotateOptions annotate;
  auto *cmd_annotate = app.add_subcommand("annotate", "Run a saved pipeline over a JSONL frame");
  cmd_annotate->add_option("--pipeline", annotate.pipeline, "Pipeline directory or registry name")->required();
  cmd_annotate->add_option("--input", annotate.input, "Input JSONL")->required();
  cmd_annotate->add_option("--output", annotate.output, "Output JSONL")->required();
  cmd_annotate->add_option("--workers", annotate.workers, "Worker threads (default ANNOFLOW_WORKERS or 1)");
  cmd_annotate->add_option("--registry", annotate.registry, "Registry root");
  cmd_annotate->callback([&] { run = [&] { return CmdAnnotate(annotate); }; });

  TrainNerOptions train_ner;
  auto *cmd_train_ner = app.add_subcommand("train-ner", "Train a NER pipeline from CoNLL data");
  cmd_train_ner->add_option("--conll", train_ner.conll, "Training CoNLL file")->required();
  cmd_train_ner->add_option("--dev", train_ner.dev, "Validation CoNLL file, merged into training");
  cmd_train_ner->add_option("--embeddings", train_ner.embeddings, "GloVe text file")->required();
  cmd_train_ner->add_option("--output", train_ner.output, "Pipeline directory")->required();
  cmd_train_ner->add_option("--loss-trace", train_ner.loss_trace, "Loss trace JSON path");
  cmd_train_ner->add_option("--seed", train_ner.seed)->capture_default_str();
  cmd_train_ner->add_flag("--force", train_ner.force, "Overwrite a non-empty output directory");
  cmd_train_ner->add_flag("--quiet", train_ner.quiet, "No per-epoch progress");
  AddNerFlags(cmd_train_ner, train_ner);
  cmd_train_ner->callback([&] { run = [&] { return CmdTrainNer(train_ner); }; });

  TrainAssertionOptions train_asr;
  auto *cmd_train_asr = app.add_subcommand("train-assertion", "Train an assertion pipeline");
  cmd_train_asr->add_option("--data", train_asr.data, "Assertion JSONL")->required();
  cmd_train_asr->add_option("--embeddings", train_asr.embeddings, "GloVe text file")->required();
  cmd_train_asr->add_option("--output", train_asr.output, "Pipeline directory")->required();
  cmd_train_asr->add_option("--seed", train_asr.seed)->capture_default_str();
  cmd_train_asr->add_option("--window", train_asr.config.window)->capture_default_str();
  cmd_train_asr->add_option("--epochs", train_asr.config.epochs)->capture_default_str();
  cmd_train_asr->add_option("--learning-rate", train_asr.config.learning_rate)->capture_default_str();
  cmd_train_asr->add_flag("--force", train_asr.force);
  cmd_train_asr->callback([&] { run = [&] { return CmdTrainAssertion(train_asr); }; });

  FitOptions fit;
  auto *cmd_fit = app.add_subcommand("fit", "Fit a pipeline spec and save it");
  cmd_fit->add_option("--spec", fit.spec, "Pipeline spec JSON")->required();
  auto *fit_input = cmd_fit->add_option("--input", fit.input, "Training frame JSONL");
  cmd_fit->add_option("--conll", fit.conll, "Labeled CoNLL training data")->excludes(fit_input);
  cmd_fit->add_option("--output", fit.output, "Pipeline directory")->required();
  cmd_fit->add_option("--seed", fit.seed)->capture_default_str();
  cmd_fit->add_flag("--force", fit.force);
  cmd_fit->callback([&] { run = [&] { return CmdFit(fit); }; });

  EvaluateOptions evaluate;
  auto *cmd_eval = app.add_subcommand("evaluate", "Score a pipeline on a CoNLL file");
  cmd_eval->add_option("--pipeline", evaluate.pipeline)->required();
  cmd_eval->add_option("--conll", evaluate.conll)->required();
  cmd_eval->add_option("--registry", evaluate.registry);
  cmd_eval->add_option("--mode", evaluate.mode, "chunk or token")->capture_default_str();
  cmd_eval->add_option("--report", evaluate.report, "Also write the JSON report here");
  cmd_eval->add_option("--workers", evaluate.workers);
  cmd_eval->add_flag("--retokenize", evaluate.retokenize,
                     "Tokenize with the pipeline and require the file tokens");
  cmd_eval->callback([&] { run = [&] { return CmdEvaluate(evaluate); }; });

  BenchmarkOptions bench;
  auto *cmd_bench = app.add_subcommand("benchmark", "Time a pipeline on a synthetic corpus");
  cmd_bench->add_option("--pipeline", bench.pipeline, "Pipeline (default: rule stages only)");
  cmd_bench->add_option("--registry", bench.registry);
  cmd_bench->add_option("--docs", bench.docs)->capture_default_str();
  cmd_bench->add_option("--min-sentences", bench.min_sentences)->capture_default_str();
  cmd_bench->add_option("--max-sentences", bench.max_sentences)->capture_default_str();
  cmd_bench->add_flag("--noise", bench.noise);
  cmd_bench->add_option("--workers", bench.workers, "Worker counts")->delimiter(',')->capture_default_str();
  cmd_bench->add_option("--repetitions", bench.repetitions)->capture_default_str();
  cmd_bench->add_option("--seed", bench.seed)->capture_default_str();
  cmd_bench->add_option("--json", bench.json_path, "Write the JSON report here");
  cmd_bench->add_option("--csv", bench.csv_path, "Write the CSV table here (default stderr)");
  cmd_bench->callback([&] { run = [&] { return CmdBenchmark(bench); }; });

  ServeOptions serve;
  auto *cmd_serve = app.add_subcommand("serve", "Answer JSON requests on stdin");
  cmd_serve->alias("serve-stdio");
  cmd_serve->add_option("--pipeline", serve.pipeline)->required();
  cmd_serve->add_option("--registry", serve.registry);
  cmd_serve->add_option("--workers", serve.workers);
  cmd_serve->callback([&] { run = [&] { return CmdServe(serve); }; });

  std::string registry_flag;
  auto *cmd_registry = app.add_subcommand("registry", "Local pipeline registry");
  cmd_registry->require_subcommand(1);
  auto *cmd_list = cmd_registry->add_subcommand("list", "List saved pipelines");
  cmd_list->add_option("--registry", registry_flag);
  cmd_list->callback([&] { run = [&] { return CmdRegistryList(registry_flag); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kArgs;
  }
  return run ? run() : static_cast<int>(kArgs);
}
