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

#include "annoflow/store/model_store.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "annoflow/core/binary_io.h"
#include "annoflow/core/error.h"

namespace annoflow::store {

namespace fs = std::filesystem;

namespace {

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string BlobName(std::size_t index, const std::string &id) {
  std::string safe;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    safe += ok ? c : '_';
  }
  char prefix[8];
  std::snprintf(prefix, sizeof prefix, "%03zu-", index);
  return std::string("blobs/") + prefix + safe + ".bin";
}

Json SeededJson(const Schema &seeded) {
  Json out = Json::object();
  for (const auto &[name, kind] : seeded) out[name] = std::string(KindName(kind));
  return out;
}

std::string ManifestText(const Json &manifest) { return manifest.dump(2) + "\n"; }

}  // namespace

Json BuildManifest(const FittedPipeline &pipeline, const Json &info) {
  Json stages = Json::array();
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    const FittedStage &stage = pipeline.stages()[i];
    Json entry = StageSpecToJson(stage.spec);
    entry["output_kind"] = std::string(KindName(stage.output_kind));
    const auto blob = stage.annotator->SaveBlob();
    if (blob.empty()) {
      entry["blob"] = nullptr;
    } else {
      entry["blob"] = BlobName(i, stage.spec.id);
      entry["blob_size"] = blob.size();
      entry["checksum"] = Hex64(Fnv1a64(blob));
    }
    stages.push_back(std::move(entry));
  }
  return Json{{"format_version", kFormatVersion},
              {"engine_version", kEngineVersion},
              {"checksum_algorithm", "fnv1a64"},
              {"seeded_columns", SeededJson(pipeline.seeded())},
              {"info", info},
              {"stages", stages}};
}

fs::path SavePipeline(const FittedPipeline &pipeline, const fs::path &dir, bool force,
                      const Json &info) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      throw Error(ErrorCode::kIo, "not a directory", dir.string());
    }
    if (!fs::is_empty(dir, ec)) {
      if (!force) {
        throw Error(ErrorCode::kDirectoryNotEmpty,
                    "refusing to overwrite a non-empty directory without --force",
                    dir.string());
      }
      fs::remove(dir / kManifestName, ec);
      fs::remove_all(dir / "blobs", ec);
    }
  }
  fs::create_directories(dir / "blobs", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory: " + ec.message(), dir.string());

  const Json manifest = BuildManifest(pipeline, info);
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    const Json &entry = manifest["stages"][i];
    if (entry["blob"].is_null()) continue;
    WriteBinaryFile(dir / entry["blob"].get<std::string>(),
                    pipeline.stages()[i].annotator->SaveBlob());
  }
  const fs::path path = dir / kManifestName;
  std::ofstream out(path, std::ios::binary);
  out << ManifestText(manifest);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest", path.string());
  return path;
}

FittedPipeline LoadPipeline(const fs::path &dir, const StageRegistry &registry) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "no pipeline manifest", path.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }

  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kUnsupportedVersion,
                  "manifest format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kFormatVersion) + ")",
                  path.string());
    }
    Schema seeded;
    const Json seeded_json = manifest.value("seeded_columns", Json::object());
    for (const auto &[name, kind] : seeded_json.items()) {
      seeded.emplace(name, ParseKind(kind.get<std::string>()));
    }
    std::vector<FittedStage> stages;
    for (const Json &entry : manifest.at("stages")) {
      StageSpec spec = StageSpecFromJson(entry);
      const StageType &type = registry.Get(spec.type);
      FittedStage stage{spec, type.output_kind, nullptr};
      if (entry.contains("blob") && !entry["blob"].is_null()) {
        const fs::path blob_path = dir / entry["blob"].get<std::string>();
        const auto bytes = ReadBinaryFile(blob_path);
        const std::string expected = entry.at("checksum").get<std::string>();
        if (Hex64(Fnv1a64(bytes)) != expected) {
          throw Error(ErrorCode::kChecksumMismatch,
                      "blob checksum does not match the manifest", blob_path.string());
        }
        if (!type.load) {
          throw Error(ErrorCode::kConfig, "stage type takes no parameter blob", spec.type);
        }
        stage.annotator = type.load(spec, bytes);
      } else {
        if (!type.build) {
          throw Error(ErrorCode::kConfig, "stage type needs a parameter blob", spec.type);
        }
        stage.annotator = type.build(spec);
      }
      stages.push_back(std::move(stage));
    }
    return FittedPipeline(std::move(stages), std::move(seeded));
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("malformed manifest: ") + e.what(),
                path.string());
  }
}

std::vector<RegistryEntry> RegistryList(const fs::path &root) {
  std::vector<RegistryEntry> out;
  std::error_code ec;
  for (fs::directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_directory()) continue;
    const fs::path manifest_path = it->path() / kManifestName;
    if (!fs::exists(manifest_path)) continue;
    RegistryEntry entry{it->path().filename().string(), it->path(), nullptr, std::nullopt};
    try {
      std::ifstream in(manifest_path, std::ios::binary);
      const Json manifest = Json::parse(in);
      Json types = Json::array();
      for (const Json &stage : manifest.at("stages")) types.push_back(stage.at("type"));
      entry.summary = Json{{"format_version", manifest.at("format_version")},
                           {"engine_version", manifest.at("engine_version")},
                           {"stages", types}};
    } catch (const std::exception &e) {
      entry.error = std::string("broken manifest: ") + e.what();
    }
    out.push_back(std::move(entry));
  }
  std::sort(out.begin(), out.end(),
            [](const RegistryEntry &a, const RegistryEntry &b) { return a.name < b.name; });
  return out;
}

std::optional<fs::path> ResolveRegistry(const std::string &flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char *env = std::getenv("ANNOFLOW_REGISTRY"); env && *env) return fs::path(env);
  return std::nullopt;
}

}  // namespace annoflow::store
