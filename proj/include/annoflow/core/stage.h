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

#ifndef ANNOFLOW_CORE_STAGE_H_
#define ANNOFLOW_CORE_STAGE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annoflow/core/frame.h"
#include "annoflow/core/jsonl.h"

namespace annoflow {

// Declaration of one pipeline stage as written in a pipeline spec file.
struct StageSpec {
  std::string id;
  std::string type;
  std::vector<std::string> inputs;
  std::string output;
  Json params = Json::object();

  bool operator==(const StageSpec &) const = default;
};

Json StageSpecToJson(const StageSpec &spec);
StageSpec StageSpecFromJson(const Json &json);

// Parses {"stages": [...]}.
std::vector<StageSpec> PipelineSpecFromJson(const Json &json);

// A ready-to-run stage. Implementations are immutable once constructed and
// must not keep mutable state, so one instance can serve any number of
// concurrent workers.
class Annotator {
 public:
  virtual ~Annotator() = default;

  // Appends the stage's output column to `record`. Inputs are read through
  // the column names in `spec`.
  virtual void Annotate(DocumentRecord &record, const StageSpec &spec) const = 0;

  // Binary parameters, for stages not fully described by their spec params.
  virtual std::vector<std::uint8_t> SaveBlob() const { return {}; }

  // Fully resolved params (for example, list files read at build time). When
  // set they replace the spec params of the fitted stage, so a saved
  // pipeline does not depend on files outside its directory.
  virtual std::optional<Json> ResolvedParams() const { return std::nullopt; }
};

using AnnotatorPtr = std::shared_ptr<const Annotator>;

// Registration record for a stage type. Whether a type is an estimator is
// a property of the registration, not of the spec file.
struct StageType {
  std::string name;
  // Expected kind per input, positionally. nullopt marks the raw text column.
  std::vector<std::optional<AnnotationKind>> input_kinds;
  AnnotationKind output_kind = AnnotationKind::kDocument;
  std::vector<std::string> default_inputs;
  std::string default_output;

  bool estimator = false;
  // Columns the fit frame must carry besides the declared inputs.
  std::vector<std::string> training_columns;
  // Estimators: type name of the transformer produced by fit.
  std::string fitted_type;
  // True when the fitted stage carries a parameter blob.
  bool has_blob = false;

  std::function<AnnotatorPtr(const StageSpec &)> build;
  std::function<AnnotatorPtr(const StageSpec &, const Frame &)> fit;
  std::function<AnnotatorPtr(const StageSpec &, std::span<const std::uint8_t>)>
      load;
};

class StageRegistry {
 public:
  void Register(StageType type);
  bool Has(const std::string &name) const;
  // Throws Error(kUnknownStageType).
  const StageType &Get(const std::string &name) const;
  std::vector<std::string> Names() const;

 private:
  std::map<std::string, StageType> types_;
};

// Registry with every built-in stage type.
const StageRegistry &DefaultRegistry();

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_STAGE_H_
