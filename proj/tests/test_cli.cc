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

#include <sys/wait.h>

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "annoflow/core/jsonl.h"
#include "doctest.h"
#include "helpers.h"

using annoflow::Json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string ReadAll(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteAll(const fs::path &p, const std::string &s) {
  std::ofstream(p, std::ios::binary) << s;
}

std::vector<std::string> Lines(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

RunResult Run(const std::string &args, const std::string &stdin_path = "/dev/null",
              const std::string &env = "") {
  const auto dir = testing::TempDir("cli-run");
  const std::string command = env + (env.empty() ? "" : " ") + ANNOFLOW_CLI_PATH + " " + args +
                              " < " + stdin_path + " > " + (dir / "out").string() + " 2> " +
                              (dir / "err").string();
  const int status = std::system(command.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadAll(dir / "out");
  r.err = ReadAll(dir / "err");
  fs::remove_all(dir);
  return r;
}

std::string Data(const std::string &name) { return testing::DataPath(name).string(); }

const std::string kToyNerFlags =
    "--epochs 200 --learning-rate 0.5 --hidden 16 --filters 8 --char-dim 8 --quiet";

// One NER pipeline trained on the 20-sentence corpus, shared by the tests below.
const fs::path &ToyNerPipeline() {
  static const fs::path dir = [] {
    const auto d = testing::TempDir("cli-toy-ner") / "pipeline";
    const auto r = Run("train-ner --conll " + Data("toy20.conll") + " --embeddings " +
                       Data("toy_embeddings.txt") + " --output " + d.string() + " " +
                       kToyNerFlags);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return d;
  }();
  return dir;
}

const fs::path &RulePipeline() {
  static const fs::path dir = [] {
    const auto d = testing::TempDir("cli-rules");
    WriteAll(d / "spec.json",
             R"({"stages":[{"type":"DocumentAssembler"},{"type":"SentenceDetector"},)"
             R"({"type":"Tokenizer"},{"type":"Normalizer"}]})");
    const auto r = Run("fit --spec " + (d / "spec.json").string() + " --output " +
                       (d / "pipeline").string());
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return d / "pipeline";
  }();
  return dir;
}

}  // namespace

TEST_CASE("bad arguments exit 2") {
  CHECK(Run("").code == 2);
  CHECK(Run("frobnicate").code == 2);
  CHECK(Run("annotate --input x.jsonl").code == 2);
  CHECK(Run("train-ner --conll x.conll").code == 2);
  CHECK(Run("--help").code == 0);
}

TEST_CASE("fit echoes its seed and saves a loadable pipeline") {
  const auto d = testing::TempDir("cli-fit");
  WriteAll(d / "spec.json", R"({"stages":[{"type":"DocumentAssembler"}]})");
  const auto r = Run("fit --spec " + (d / "spec.json").string() + " --output " +
                     (d / "p").string() + " --seed 11");
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["seed"] == 11);
  CHECK(Json::parse(ReadAll(d / "p" / "manifest.json"))["info"]["seed"] == 11);
  CHECK(Run("fit --spec " + (d / "spec.json").string() + " --output " + (d / "p").string())
            .code == 2);
  CHECK(Run("fit --spec " + (d / "missing.json").string() + " --output " + (d / "q").string())
            .code == 4);
}

TEST_CASE("annotate: ten documents in, ten records out") {
  const auto d = testing::TempDir("cli-annotate");
  const auto r = Run("annotate --pipeline " + RulePipeline().string() + " --input " +
                     Data("notes10.jsonl") + " --output " + (d / "out.jsonl").string());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.err.find("docs/sec") != std::string::npos);
  const auto lines = Lines(ReadAll(d / "out.jsonl"));
  REQUIRE(lines.size() == 10);
  const Json first = Json::parse(lines[0]);
  CHECK(first["id"] == "n0");
  CHECK(first["columns"]["token"].size() == 4);
  for (const auto &line : lines) CHECK_FALSE(Json::parse(line).contains("error"));
}

TEST_CASE("annotate: workers do not change the output") {
  const auto d = testing::TempDir("cli-annotate-w");
  const std::string base = "annotate --pipeline " + RulePipeline().string() + " --input " +
                           Data("notes10.jsonl") + " --output ";
  REQUIRE(Run(base + (d / "w1.jsonl").string() + " --workers 1").code == 0);
  REQUIRE(Run(base + (d / "w4.jsonl").string() + " --workers 4").code == 0);
  REQUIRE(Run(base + (d / "env.jsonl").string(), "/dev/null", "ANNOFLOW_WORKERS=3").code == 0);
  CHECK(ReadAll(d / "w1.jsonl") == ReadAll(d / "w4.jsonl"));
  CHECK(ReadAll(d / "w1.jsonl") == ReadAll(d / "env.jsonl"));
  CHECK(Run(base + (d / "w0.jsonl").string() + " --workers 0").code == 2);
}

TEST_CASE("annotate: load and IO failures") {
  const auto d = testing::TempDir("cli-annotate-fail");
  const auto missing = Run("annotate --pipeline " + (d / "nope").string() + " --input " +
                           Data("notes10.jsonl") + " --output " + (d / "o.jsonl").string());
  CHECK(missing.code == 3);
  CHECK(missing.err.find("cannot load pipeline") != std::string::npos);
  CHECK(Run("annotate --pipeline " + RulePipeline().string() + " --input " +
            (d / "absent.jsonl").string() + " --output " + (d / "o.jsonl").string())
            .code == 4);
  CHECK(Run("annotate --pipeline " + RulePipeline().string() + " --input " +
            Data("notes10.jsonl") + " --output /nonexistent-dir/o.jsonl")
            .code == 4);
}

TEST_CASE("annotate: a malformed line becomes an error record and the run succeeds") {
  const auto d = testing::TempDir("cli-annotate-bad");
  auto lines = Lines(ReadAll(Data("notes10.jsonl")));
  lines[4] = "{\"id\": \"n4\", \"text\": ";
  std::string input;
  for (const auto &l : lines) input += l + "\n";
  WriteAll(d / "in.jsonl", input);
  const auto r = Run("annotate --pipeline " + RulePipeline().string() + " --input " +
                     (d / "in.jsonl").string() + " --output " + (d / "out.jsonl").string());
  CHECK(r.code == 0);
  const auto out = Lines(ReadAll(d / "out.jsonl"));
  REQUIRE(out.size() == 10);
  int errors = 0;
  for (const auto &l : out) errors += Json::parse(l).contains("error") ? 1 : 0;
  CHECK(errors == 1);
  CHECK(Json::parse(out[4]).contains("error"));
  CHECK(Json::parse(out[5])["columns"].contains("token"));
}

TEST_CASE("pipelines resolve by registry name") {
  const auto root = testing::TempDir("cli-registry");
  fs::copy(RulePipeline(), root / "rules", fs::copy_options::recursive);
  const auto d = testing::TempDir("cli-registry-out");
  CHECK(Run("annotate --pipeline rules --registry " + root.string() + " --input " +
            Data("notes10.jsonl") + " --output " + (d / "a.jsonl").string())
            .code == 0);
  CHECK(Run("annotate --pipeline rules --input " + Data("notes10.jsonl") + " --output " +
                (d / "b.jsonl").string(),
            "/dev/null", "ANNOFLOW_REGISTRY=" + root.string())
            .code == 0);
  CHECK(ReadAll(d / "a.jsonl") == ReadAll(d / "b.jsonl"));

  fs::create_directories(root / "broken");
  WriteAll(root / "broken" / "manifest.json", "{");
  const auto listed = Run("registry list --registry " + root.string());
  REQUIRE(listed.code == 0);
  const Json entries = Json::parse(listed.out);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0]["name"] == "broken");
  CHECK(entries[0].contains("error"));
  CHECK(entries[1]["name"] == "rules");
  CHECK(Run("registry list", "/dev/null", "ANNOFLOW_REGISTRY=").code == 2);
  CHECK(Run("registry list --registry " + (root / "nope").string()).code == 4);
}

TEST_CASE("train-ner on the toy corpus reproduces the training labels") {
  const auto &dir = ToyNerPipeline();
  CHECK(fs::exists(dir / "manifest.json"));
  const Json trace = Json::parse(ReadAll(dir / "loss_trace.json"));
  CHECK(trace["seed"] == 42);
  CHECK(trace["loss"].size() == 200);
  const auto r = Run("evaluate --pipeline " + dir.string() + " --conll " + Data("toy20.conll"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const Json report = Json::parse(Lines(r.out).at(0));
  CHECK(report["f1"] == 1.0);
  CHECK(report["sentences"] == 20);
  CHECK(r.out.find("overall") != std::string::npos);
}

TEST_CASE("train-ner with zero epochs saves the initial model") {
  const auto d = testing::TempDir("cli-ner0");
  const auto r = Run("train-ner --conll " + Data("toy5.conll") + " --embeddings " +
                     Data("toy_embeddings.txt") + " --output " + (d / "p").string() +
                     " --epochs 0 --seed 9");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const Json summary = Json::parse(r.out);
  CHECK(summary["seed"] == 9);
  CHECK(summary["final_loss"].is_null());
  CHECK(Json::parse(ReadAll(d / "p" / "loss_trace.json"))["loss"].empty());
  CHECK(Run("evaluate --pipeline " + (d / "p").string() + " --conll " + Data("toy5.conll"))
            .code == 0);
}

TEST_CASE("train-ner failure exits") {
  const auto d = testing::TempDir("cli-ner-fail");
  CHECK(Run("train-ner --conll " + Data("toy5.conll") + " --embeddings " +
            (d / "missing.txt").string() + " --output " + (d / "p").string())
            .code == 4);
  CHECK(Run("train-ner --conll " + (d / "missing.conll").string() + " --embeddings " +
            Data("toy_embeddings.txt") + " --output " + (d / "p").string())
            .code == 4);
  CHECK(Run("train-ner --conll " + Data("toy5.conll") + " --embeddings " +
            Data("toy_embeddings.txt") + " --output " + (d / "p").string() +
            " --optimizer rmsprop")
            .code == 2);
  const auto nan = Run("train-ner --conll " + Data("toy5.conll") + " --embeddings " +
                       Data("toy_embeddings.txt") + " --output " + (d / "nan").string() +
                       " --epochs 20 --learning-rate 1e300 --clip-norm 1e300 --quiet");
  CHECK(nan.code == 5);
  CHECK(nan.err.find("epoch") != std::string::npos);
}

TEST_CASE("train-ner is reproducible from its echoed seed") {
  const auto d = testing::TempDir("cli-ner-seed");
  const std::string base = "train-ner --conll " + Data("toy5.conll") + " --embeddings " +
                           Data("toy_embeddings.txt") + " --epochs 3 --quiet --seed 5 --output ";
  REQUIRE(Run(base + (d / "a").string()).code == 0);
  REQUIRE(Run(base + (d / "b").string()).code == 0);
  CHECK(ReadAll(d / "a" / "manifest.json") == ReadAll(d / "b" / "manifest.json"));
  CHECK(ReadAll(d / "a" / "loss_trace.json") == ReadAll(d / "b" / "loss_trace.json"));
}

TEST_CASE("evaluate: token mismatches, empty data and bad modes") {
  const auto d = testing::TempDir("cli-eval");
  WriteAll(d / "hyphen.conll", "Patient O\nhas O\nB-cell B-Disease\nlymphoma I-Disease\n");
  const std::string pipe = ToyNerPipeline().string();
  const auto trusting = Run("evaluate --pipeline " + pipe + " --conll " +
                            (d / "hyphen.conll").string());
  CHECK(trusting.code == 0);
  const auto retok = Run("evaluate --pipeline " + pipe + " --conll " +
                         (d / "hyphen.conll").string() + " --retokenize");
  CHECK(retok.code == 6);
  CHECK(retok.err.find("sentence 0") != std::string::npos);

  WriteAll(d / "empty.conll", "");
  CHECK(Run("evaluate --pipeline " + pipe + " --conll " + (d / "empty.conll").string()).code ==
        2);
  CHECK(Run("evaluate --pipeline " + pipe + " --conll " + Data("toy5.conll") + " --mode macro")
            .code == 2);
  const auto token = Run("evaluate --pipeline " + pipe + " --conll " + Data("toy5.conll") +
                         " --mode token --report " + (d / "r.json").string());
  REQUIRE(token.code == 0);
  CHECK(Json::parse(ReadAll(d / "r.json"))["mode"] == "token_excluding_o");
  CHECK(Run("evaluate --pipeline " + RulePipeline().string() + " --conll " + Data("toy5.conll"))
            .code == 2);
}

TEST_CASE("benchmark emits JSON and CSV") {
  const auto d = testing::TempDir("cli-bench");
  const auto r = Run("benchmark --docs 40 --workers 1,2 --repetitions 3 --seed 8 --csv " +
                     (d / "t.csv").string() + " --json " + (d / "t.json").string());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const Json j = Json::parse(r.out);
  CHECK(j["seed"] == 8);
  CHECK(j["corpus"]["docs"] == 40);
  CHECK(Json::parse(ReadAll(d / "t.json")) == j);
  CHECK(ReadAll(d / "t.csv").rfind("stage,", 0) == 0);
  const auto to_stderr = Run("benchmark --docs 10 --workers 1 --repetitions 3");
  CHECK(to_stderr.code == 0);
  CHECK(to_stderr.err.find("stage,") != std::string::npos);
  CHECK(Run("benchmark --docs 10 --workers 2,4").code == 2);
  CHECK(Run("benchmark --docs 10 --repetitions 1").code == 2);
  CHECK(Run("benchmark --pipeline " + (d / "none").string()).code == 3);
}

TEST_CASE("serve answers ping, annotate and malformed requests") {
  const auto d = testing::TempDir("cli-serve");
  WriteAll(d / "req.jsonl",
           "{\"op\":\"ping\",\"id\":1}\n"
           "{not json\n"
           "{\"op\":\"annotate\",\"id\":\"a\",\"record\":{\"id\":\"n0\",\"text\":\"Patient "
           "denies nausea.\"}}\n"
           "{\"op\":\"explode\",\"id\":7}\n"
           "{\"op\":\"annotate\",\"id\":8}\n");
  const auto r = Run("serve --pipeline " + RulePipeline().string(), (d / "req.jsonl").string());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto lines = Lines(r.out);
  REQUIRE(lines.size() == 5);
  std::map<std::string, Json> by_id;
  int null_ids = 0;
  for (const auto &l : lines) {
    const Json j = Json::parse(l);
    if (j["id"].is_null()) {
      ++null_ids;
      CHECK(j.contains("error"));
    } else {
      by_id[j["id"].dump()] = j;
    }
  }
  CHECK(null_ids == 1);
  CHECK(by_id.at("1")["result"] == "pong");
  CHECK(by_id.at("7").contains("error"));
  CHECK(by_id.at("8").contains("error"));

  WriteAll(d / "ping.jsonl", "{\"op\":\"ping\",\"id\":2}\n");
  const auto alias =
      Run("serve-stdio --pipeline " + RulePipeline().string(), (d / "ping.jsonl").string());
  CHECK(alias.code == 0);
  CHECK(Json::parse(alias.out)["result"] == "pong");

  // Same record through annotate gives the same annotations.
  WriteAll(d / "one.jsonl", "{\"id\":\"n0\",\"text\":\"Patient denies nausea.\"}\n");
  REQUIRE(Run("annotate --pipeline " + RulePipeline().string() + " --input " +
              (d / "one.jsonl").string() + " --output " + (d / "one.out").string())
              .code == 0);
  const Json via_annotate = Json::parse(Lines(ReadAll(d / "one.out")).at(0));
  CHECK(by_id.at("\"a\"")["result"] == via_annotate);
  CHECK(Run("serve --pipeline " + (d / "missing").string()).code == 3);
}

TEST_CASE("serve answers every id exactly once with several workers") {
  const auto d = testing::TempDir("cli-serve-many");
  std::string requests;
  for (int i = 0; i < 200; ++i) {
    requests += "{\"op\":\"annotate\",\"id\":" + std::to_string(i) +
                ",\"record\":{\"id\":\"r\",\"text\":\"Fever " + std::to_string(i) +
                ". Denies cough.\"}}\n";
  }
  WriteAll(d / "req.jsonl", requests);
  const auto r =
      Run("serve --workers 4 --pipeline " + RulePipeline().string(), (d / "req.jsonl").string());
  REQUIRE(r.code == 0);
  std::map<int, int> seen;
  for (const auto &l : Lines(r.out)) {
    const Json j = Json::parse(l);
    ++seen[j["id"].get<int>()];
    CHECK(j["result"]["columns"]["sentence"].size() == 2);
  }
  CHECK(seen.size() == 200);
  for (const auto &[id, n] : seen) CHECK(n == 1);
}

TEST_CASE("train-assertion echoes its seed and reproduces bit-for-bit") {
  const auto d = testing::TempDir("cli-asr");
  const std::string base = "train-assertion --data " + Data("assertion_toy.jsonl") +
                           " --embeddings " + Data("toy_embeddings.txt") +
                           " --epochs 50 --seed 7 --output ";
  const auto a = Run(base + (d / "a").string());
  REQUIRE_MESSAGE(a.code == 0, a.err);
  CHECK(Json::parse(a.out)["seed"] == 7);
  REQUIRE(Run(base + (d / "b").string()).code == 0);
  CHECK(ReadAll(d / "a" / "manifest.json") == ReadAll(d / "b" / "manifest.json"));
  for (const auto &e : fs::directory_iterator(d / "a" / "blobs")) {
    CHECK(ReadAll(e.path()) == ReadAll(d / "b" / "blobs" / e.path().filename()));
  }
  CHECK(Run(base + (d / "a").string()).code == 2);
  CHECK(Run(base + (d / "a").string() + " --force").code == 0);
}
