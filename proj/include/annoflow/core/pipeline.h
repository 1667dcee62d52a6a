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

#ifndef ANNOFLOW_CORE_PIPELINE_H_
#define ANNOFLOW_CORE_PIPELINE_H_

#include <string>
#include <utility>
#include <vector>

#include "annoflow/core/frame.h"
#include "annoflow/core/stage.h"

namespace annoflow {

using OrderedSchema = std::vector<std::pair<std::string, AnnotationKind>>;

// Fills omitted inputs/output from the stage type defaults and assigns an id
// when none is given.
std::vector<StageSpec> ResolveSpecs(std::vector<StageSpec> specs,
                                    const StageRegistry &registry = DefaultRegistry());

// Validates the data flow of a stage list. `seeded` lists columns the input
// frame already carries. Returns seeded columns followed by the stage
// outputs in order.
//
// Errors: MissingInput (subject = absent column), KindMismatch,
// DuplicateOutput, UnknownStageType.
OrderedSchema SchemaCheck(const std::vector<StageSpec> &specs,
                          const Schema &seeded = {},
                          const StageRegistry &registry = DefaultRegistry());

struct FittedStage {
  StageSpec spec;  // type is the transformer type after fitting
  AnnotationKind output_kind = AnnotationKind::kDocument;
  AnnotatorPtr annotator;
};

// Immutable after construction; safe to share across threads.
class FittedPipeline {
 public:
  FittedPipeline() = default;
  FittedPipeline(std::vector<FittedStage> stages, Schema seeded);

  const std::vector<FittedStage> &stages() const { return stages_; }
  const Schema &seeded() const { return seeded_; }
  std::size_t size() const { return stages_.size(); }

  // Runs every stage on one record. Stages whose output column the record
  // already carries are skipped, so pre-tokenized input flows through
  // unchanged. Failures are captured in `record.error`, never thrown.
  DocumentRecord TransformRecord(DocumentRecord record) const;

  // Record order is preserved; the input frame is not modified.
  Frame Transform(const Frame &frame) const;

  // Pipeline made of the first `n` stages.
  FittedPipeline Prefix(std::size_t n) const;

  // Seeded columns plus every stage output.
  Schema OutputSchema() const;

 private:
  std::vector<FittedStage> stages_;
  Schema seeded_;
};

// Fits estimator stages in order, each on the frame as transformed by every
// stage before it. Stage errors are rethrown with the stage id attached.
FittedPipeline PipelineFit(const std::vector<StageSpec> &specs, const Frame &frame,
                           const StageRegistry &registry = DefaultRegistry());

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_PIPELINE_H_
