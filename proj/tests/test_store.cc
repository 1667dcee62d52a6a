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

#include <fstream>
#include <iterator>

#include "annoflow/assertion/assertion.h"
#include "annoflow/core/error.h"
#include "annoflow/core/jsonl.h"
#include "annoflow/eval/conll.h"
#include "annoflow/parallel/synthetic.h"
#include "annoflow/stages/workflows.h"
#include "annoflow/store/model_store.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace annoflow;
namespace fs = std::filesystem;

namespace {

std::string ReadAll(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteAll(const fs::path &p, const std::string &s) {
  std::ofstream(p, std::ios::binary) << s;
}

// Text stages, embeddings, a tiny NER tagger and its converter.
FittedPipeline TinyNerPipeline() {
  const auto data = parallel::SyntheticLabeledSentences(6, 3);
  ner::NerConfig c;
  c.char_dim = 2;
  c.filters = 2;
  c.hidden = 2;
  c.epochs = 2;
  return stages::TrainNerPipeline(data, parallel::SyntheticEmbeddings(4, 3), c).pipeline;
}

Frame FuzzCorpus(std::size_t docs, std::uint64_t seed) {
  oracle::Gen g(seed);
  Frame f;
  for (std::size_t i = 0; i < docs; ++i) {
    f.records.push_back(testing::Record("f" + std::to_string(i), oracle::RandomText(g, 20)));
  }
  return f;
}

}  // namespace

TEST_CASE("rule-only pipelines save without blobs and round-trip") {
  const auto pipeline = PipelineFit(stages::RuleStageSpecs(), Frame{});
  const auto dir = testing::TempDir("store-rules");
  const fs::path manifest = store::SavePipeline(pipeline, dir);
  CHECK(manifest == dir / "manifest.json");
  const Json j = Json::parse(ReadAll(manifest));
  CHECK(j["format_version"] == 1);
  CHECK(j["checksum_algorithm"] == "fnv1a64");
  REQUIRE(j["stages"].size() == 3);
  CHECK(j["stages"][0]["blob"].is_null());
  CHECK(j["stages"][1]["params"].contains("abbreviations"));
  const auto loaded = store::LoadPipeline(dir);
  const Frame corpus = FuzzCorpus(50, 1);
  CHECK(SerializeFrame(loaded.Transform(corpus)) == SerializeFrame(pipeline.Transform(corpus)));
}

TEST_CASE("save, load, transform is byte-identical for a trained pipeline") {
  const auto pipeline = TinyNerPipeline();
  const auto dir = testing::TempDir("store-ner");
  store::SavePipeline(pipeline, dir, false, Json{{"seed", 42}});
  const auto loaded = store::LoadPipeline(dir);
  REQUIRE(loaded.size() == pipeline.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.stages()[i].spec == pipeline.stages()[i].spec);
    CHECK(loaded.stages()[i].annotator->SaveBlob() == pipeline.stages()[i].annotator->SaveBlob());
  }
  const Frame corpus = FuzzCorpus(100, 2);
  CHECK(SerializeFrame(loaded.Transform(corpus)) == SerializeFrame(pipeline.Transform(corpus)));
  CHECK(Json::parse(ReadAll(dir / "manifest.json"))["info"]["seed"] == 42);
}

TEST_CASE("manifest JSON carries no floating-point numbers") {
  const auto dir = testing::TempDir("store-nofloat");
  store::SavePipeline(TinyNerPipeline(), dir);
  std::function<void(const Json &)> walk = [&](const Json &j) {
    CHECK_FALSE(j.is_number_float());
    if (j.is_structured()) {
      for (const auto &child : j) walk(child);
    }
  };
  walk(Json::parse(ReadAll(dir / "manifest.json")));
}

TEST_CASE("saving twice gives identical bytes") {
  const auto pipeline = TinyNerPipeline();
  const auto a = testing::TempDir("store-a");
  const auto b = testing::TempDir("store-b");
  store::SavePipeline(pipeline, a);
  store::SavePipeline(pipeline, b);
  CHECK(ReadAll(a / "manifest.json") == ReadAll(b / "manifest.json"));
  for (const auto &entry : fs::directory_iterator(a / "blobs")) {
    CHECK(ReadAll(entry.path()) == ReadAll(b / "blobs" / entry.path().filename()));
  }
  // Loading and re-saving also reproduces the bytes.
  const auto c = testing::TempDir("store-c");
  store::SavePipeline(store::LoadPipeline(a), c);
  CHECK(ReadAll(a / "manifest.json") == ReadAll(c / "manifest.json"));
}

TEST_CASE("non-empty directories need the force flag") {
  const auto pipeline = PipelineFit(stages::RuleStageSpecs(), Frame{});
  const auto dir = testing::TempDir("store-force");
  WriteAll(dir / "notes.txt", "keep");
  CHECK_ERROR_CODE(store::SavePipeline(pipeline, dir), ErrorCode::kDirectoryNotEmpty);
  CHECK_NOTHROW(store::SavePipeline(pipeline, dir, true));
  CHECK_NOTHROW(store::LoadPipeline(dir));
  CHECK_ERROR_CODE(store::SavePipeline(pipeline, dir), ErrorCode::kDirectoryNotEmpty);
  WriteAll(dir / "file", "x");
  CHECK_ERROR_CODE(store::SavePipeline(pipeline, dir / "file", true), ErrorCode::kIo);
}

TEST_CASE("every single-byte blob corruption is detected") {
  const auto dir = testing::TempDir("store-corrupt");
  store::SavePipeline(TinyNerPipeline(), dir);
  std::size_t flips = 0;
  for (const auto &entry : fs::directory_iterator(dir / "blobs")) {
    const std::string original = ReadAll(entry.path());
    for (std::size_t i = 0; i < original.size(); ++i) {
      std::string bad = original;
      bad[i] = static_cast<char>(bad[i] ^ 0x01);
      WriteAll(entry.path(), bad);
      auto err = testing::CatchError([&] { store::LoadPipeline(dir); });
      ++flips;
      REQUIRE(err);
      CHECK(err->code() == ErrorCode::kChecksumMismatch);
      CHECK(err->subject().find(entry.path().filename().string()) != std::string::npos);
    }
    WriteAll(entry.path(), original);
  }
  CHECK(flips > 1000);
  CHECK_NOTHROW(store::LoadPipeline(dir));
}

TEST_CASE("load errors: missing, malformed, future version, unknown type") {
  CHECK_ERROR_CODE(store::LoadPipeline(testing::TempDir("store-missing")), ErrorCode::kIo);

  const auto dir = testing::TempDir("store-edit");
  store::SavePipeline(PipelineFit(stages::RuleStageSpecs(), Frame{}), dir);
  const std::string text = ReadAll(dir / "manifest.json");

  WriteAll(dir / "manifest.json", "{ nope");
  CHECK_ERROR_CODE(store::LoadPipeline(dir), ErrorCode::kParse);

  Json future = Json::parse(text);
  future["format_version"] = 2;
  WriteAll(dir / "manifest.json", future.dump());
  CHECK_ERROR_CODE(store::LoadPipeline(dir), ErrorCode::kUnsupportedVersion);

  Json unknown = Json::parse(text);
  unknown["stages"][1]["type"] = "SpellChecker";
  WriteAll(dir / "manifest.json", unknown.dump());
  CHECK_ERROR_CODE(store::LoadPipeline(dir), ErrorCode::kUnknownStageType);

  Json no_stages = Json::parse(text);
  no_stages.erase("stages");
  WriteAll(dir / "manifest.json", no_stages.dump());
  CHECK_ERROR_CODE(store::LoadPipeline(dir), ErrorCode::kParse);
}

TEST_CASE("missing blob file is an IO failure") {
  const auto dir = testing::TempDir("store-noblob");
  store::SavePipeline(TinyNerPipeline(), dir);
  fs::remove_all(dir / "blobs");
  auto err = testing::CatchError([&] { store::LoadPipeline(dir); });
  REQUIRE(err);
  CHECK(err->code() == ErrorCode::kIo);
}

TEST_CASE("assertion pipelines round-trip with their seeded chunk column") {
  const auto records =
      assertion::ReadAssertionJsonlFile(testing::DataPath("assertion_toy.jsonl"));
  assertion::AssertionConfig c;
  c.epochs = 20;
  const auto table = embeddings::LoadGlove(testing::DataPath("toy_embeddings.txt"));
  const auto run = stages::TrainAssertionPipeline(records, table, c);
  const auto dir = testing::TempDir("store-assertion");
  store::SavePipeline(run.pipeline, dir);
  const auto loaded = store::LoadPipeline(dir);
  CHECK(loaded.seeded() == run.pipeline.seeded());
  const Frame frame = stages::AssertionRecordsToFrame(records);
  CHECK(SerializeFrame(loaded.Transform(frame)) == SerializeFrame(run.pipeline.Transform(frame)));
}

TEST_CASE("registry listing") {
  const auto root = testing::TempDir("registry");
  CHECK(store::RegistryList(root).empty());

  const auto pipeline = PipelineFit(stages::RuleStageSpecs(), Frame{});
  store::SavePipeline(pipeline, root / "zeta");
  store::SavePipeline(pipeline, root / "alpha");
  fs::create_directories(root / "not-a-pipeline");
  auto two = store::RegistryList(root);
  REQUIRE(two.size() == 2);
  CHECK(two[0].name == "alpha");
  CHECK(two[1].name == "zeta");
  CHECK_FALSE(two[0].error);
  CHECK(two[0].summary["stages"].size() == 3);

  fs::create_directories(root / "broken");
  WriteAll(root / "broken" / "manifest.json", "[1, 2");
  const auto three = store::RegistryList(root);
  REQUIRE(three.size() == 3);
  CHECK(three[1].name == "broken");
  CHECK(three[1].error);
  CHECK(three[2].name == "zeta");
}

TEST_CASE("registry root resolution") {
  ::unsetenv("ANNOFLOW_REGISTRY");
  CHECK_FALSE(store::ResolveRegistry(""));
  CHECK(*store::ResolveRegistry("/tmp/r") == fs::path("/tmp/r"));
  ::setenv("ANNOFLOW_REGISTRY", "/srv/models", 1);
  CHECK(*store::ResolveRegistry("") == fs::path("/srv/models"));
  CHECK(*store::ResolveRegistry("/tmp/r") == fs::path("/tmp/r"));
  ::unsetenv("ANNOFLOW_REGISTRY");
}
