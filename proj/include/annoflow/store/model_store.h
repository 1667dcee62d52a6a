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

#ifndef ANNOFLOW_STORE_MODEL_STORE_H_
#define ANNOFLOW_STORE_MODEL_STORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "annoflow/core/jsonl.h"
#include "annoflow/core/pipeline.h"

namespace annoflow::store {

inline constexpr int kFormatVersion = 1;
inline constexpr const char kEngineVersion[] = "0.1.0";
inline constexpr const char kManifestName[] = "manifest.json";

// Manifest document for `pipeline`; blob entries carry the FNV-1a checksum of
// each stage's SaveBlob() bytes. `info` is stored verbatim under "info".
Json BuildManifest(const FittedPipeline &pipeline, const Json &info = Json::object());

// Writes manifest.json and blobs/*.bin. Keys are sorted and floats live only
// in blobs, so saving the same pipeline twice yields identical bytes.
// Errors: DirectoryNotEmpty (unless `force`), Io.
std::filesystem::path SavePipeline(const FittedPipeline &pipeline,
                                   const std::filesystem::path &dir, bool force = false,
                                   const Json &info = Json::object());

// Errors: Io (no manifest), Parse, UnsupportedVersion, ChecksumMismatch
// (subject = blob path), UnknownStageType.
FittedPipeline LoadPipeline(const std::filesystem::path &dir,
                            const StageRegistry &registry = DefaultRegistry());

struct RegistryEntry {
  std::string name;
  std::filesystem::path path;
  Json summary;                      // null when the manifest is broken
  std::optional<std::string> error;  // set when the manifest is broken
};

// Immediate subdirectories of `root` holding a manifest, sorted by name.
// Unreadable manifests are listed with `error` set.
std::vector<RegistryEntry> RegistryList(const std::filesystem::path &root);

// `flag` when non-empty, else ANNOFLOW_REGISTRY, else nullopt.
std::optional<std::filesystem::path> ResolveRegistry(const std::string &flag);

}  // namespace annoflow::store

#endif  // ANNOFLOW_STORE_MODEL_STORE_H_
