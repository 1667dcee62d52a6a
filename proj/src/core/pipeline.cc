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

#include "annoflow/core/pipeline.h"

#include <algorithm>
#include <set>

#include "annoflow/core/error.h"

namespace annoflow {

namespace {

std::string StageLabel(const StageSpec &spec) {
  return "stage '" + spec.id + "' (" + spec.type + ")";
}

// Applies one stage to a record, skipping it when the output is seeded.
void ApplyStage(const FittedStage &stage, DocumentRecord &record) {
  if (record.HasColumn(stage.spec.output)) return;
  for (const auto &input : stage.spec.inputs) {
    if (input != kTextColumn && !record.HasColumn(input)) {
      throw Error(ErrorCode::kMissingInput,
                  StageLabel(stage.spec) + " needs column '" + input + "'", input);
    }
  }
  stage.annotator->Annotate(record, stage.spec);
  auto it = record.columns.find(stage.spec.output);
  if (it == record.columns.end()) {
    record.columns.emplace(stage.spec.output, Column{});
  } else {
    std::stable_sort(it->second.begin(), it->second.end(), SpanLess);
  }
}

}  // namespace

std::vector<StageSpec> ResolveSpecs(std::vector<StageSpec> specs,
                                    const StageRegistry &registry) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    StageSpec &spec = specs[i];
    const StageType &type = registry.Get(spec.type);
    if (spec.inputs.empty()) spec.inputs = type.default_inputs;
    if (spec.output.empty()) spec.output = type.default_output;
    if (spec.id.empty()) spec.id = spec.type + "_" + std::to_string(i);
  }
  return specs;
}

OrderedSchema SchemaCheck(const std::vector<StageSpec> &specs, const Schema &seeded,
                          const StageRegistry &registry) {
  if (specs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "pipeline has no stages");
  }
  OrderedSchema ordered(seeded.begin(), seeded.end());
  Schema available = seeded;
  std::set<std::string> outputs;
  std::set<std::string> ids;

  for (const StageSpec &spec : specs) {
    const StageType &type = registry.Get(spec.type);
    if (!ids.insert(spec.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate stage id", spec.id);
    }
    if (spec.inputs.size() != type.input_kinds.size()) {
      throw Error(ErrorCode::kConfig,
                  StageLabel(spec) + " expects " +
                      std::to_string(type.input_kinds.size()) + " inputs",
                  spec.id);
    }
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
      const std::string &input = spec.inputs[i];
      const auto &expected = type.input_kinds[i];
      if (!expected) {
        if (input != kTextColumn) {
          throw Error(ErrorCode::kKindMismatch,
                      StageLabel(spec) + " reads the raw text column, got '" +
                          input + "'",
                      input);
        }
        continue;
      }
      auto it = available.find(input);
      if (it == available.end()) {
        throw Error(ErrorCode::kMissingInput,
                    StageLabel(spec) + " needs column '" + input +
                        "' which no earlier stage produces",
                    input);
      }
      if (it->second != *expected) {
        throw Error(ErrorCode::kKindMismatch,
                    StageLabel(spec) + " expects '" + input + "' of kind " +
                        std::string(KindName(*expected)) + ", found " +
                        std::string(KindName(it->second)),
                    input);
      }
    }
    if (spec.output.empty() || spec.output == kTextColumn) {
      throw Error(ErrorCode::kConfig, StageLabel(spec) + " has an invalid output name",
                  spec.output);
    }
    if (!outputs.insert(spec.output).second) {
      throw Error(ErrorCode::kDuplicateOutput,
                  "column '" + spec.output + "' is produced twice", spec.output);
    }
    auto seeded_it = available.find(spec.output);
    if (seeded_it != available.end()) {
      // A seeded column stands in for this stage; it must have the same kind.
      if (seeded_it->second != type.output_kind) {
        throw Error(ErrorCode::kKindMismatch,
                    "seeded column '" + spec.output + "' conflicts with " +
                        StageLabel(spec),
                    spec.output);
      }
      continue;
    }
    available.emplace(spec.output, type.output_kind);
    ordered.emplace_back(spec.output, type.output_kind);
  }
  return ordered;
}

FittedPipeline::FittedPipeline(std::vector<FittedStage> stages, Schema seeded)
    : stages_(std::move(stages)), seeded_(std::move(seeded)) {}

DocumentRecord FittedPipeline::TransformRecord(DocumentRecord record) const {
  if (record.error) return record;
  const FittedStage *current = nullptr;
  try {
    for (const auto &stage : stages_) {
      current = &stage;
      ApplyStage(stage, record);
    }
  } catch (const std::exception &e) {
    record.error = (current ? StageLabel(current->spec) + ": " : std::string()) + e.what();
  }
  return record;
}

Frame FittedPipeline::Transform(const Frame &frame) const {
  Frame out;
  out.records.reserve(frame.records.size());
  for (const auto &record : frame.records) out.records.push_back(TransformRecord(record));
  out.schema = frame.schema;
  for (const auto &[name, kind] : OutputSchema()) out.schema.emplace(name, kind);
  return out;
}

FittedPipeline FittedPipeline::Prefix(std::size_t n) const {
  n = std::min(n, stages_.size());
  return FittedPipeline(
      std::vector<FittedStage>(stages_.begin(), stages_.begin() + static_cast<long>(n)),
      seeded_);
}

Schema FittedPipeline::OutputSchema() const {
  Schema schema = seeded_;
  for (const auto &stage : stages_) schema.emplace(stage.spec.output, stage.output_kind);
  return schema;
}

FittedPipeline PipelineFit(const std::vector<StageSpec> &raw_specs, const Frame &frame,
                           const StageRegistry &registry) {
  std::vector<StageSpec> specs = ResolveSpecs(raw_specs, registry);
  Schema seeded = frame.schema;
  SchemaCheck(specs, seeded, registry);

  Frame current = frame;
  std::vector<FittedStage> fitted;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const StageSpec &spec = specs[i];
    const StageType &type = registry.Get(spec.type);
    FittedStage stage{spec, type.output_kind, nullptr};
    if (type.estimator) {
      for (const auto &column : type.training_columns) {
        if (current.schema.find(column) == current.schema.end()) {
          throw Error(ErrorCode::kMissingInput,
                      StageLabel(spec) + " needs training column '" + column + "'",
                      column);
        }
      }
      try {
        stage.annotator = type.fit(spec, current);
      } catch (const Error &e) {
        throw Error(e.code(), StageLabel(spec) + ": " + e.what(), spec.id, e.line());
      }
      stage.spec.type = type.fitted_type;
    } else {
      stage.annotator = type.build(spec);
    }
    if (auto params = stage.annotator->ResolvedParams()) stage.spec.params = *params;
    fitted.push_back(std::move(stage));
    if (i + 1 < specs.size()) {
      FittedPipeline single({fitted.back()}, {});
      current = single.Transform(current);
    }
  }
  return FittedPipeline(std::move(fitted), std::move(seeded));
}

}  // namespace annoflow
