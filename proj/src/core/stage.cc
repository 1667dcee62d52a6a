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

#include "annoflow/core/stage.h"

#include "annoflow/core/error.h"

namespace annoflow {

Json StageSpecToJson(const StageSpec &spec) {
  return Json{{"id", spec.id},
              {"type", spec.type},
              {"inputs", spec.inputs},
              {"output", spec.output},
              {"params", spec.params}};
}

StageSpec StageSpecFromJson(const Json &json) {
  try {
    StageSpec spec;
    spec.type = json.at("type").get<std::string>();
    spec.id = json.value("id", std::string());
    if (auto it = json.find("inputs"); it != json.end()) {
      spec.inputs = it->get<std::vector<std::string>>();
    }
    spec.output = json.value("output", std::string());
    if (auto it = json.find("params"); it != json.end()) {
      if (!it->is_object()) throw Error(ErrorCode::kParse, "params must be an object");
      spec.params = *it;
    }
    return spec;
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad stage spec: ") + e.what());
  }
}

std::vector<StageSpec> PipelineSpecFromJson(const Json &json) {
  if (!json.is_object() || !json.contains("stages") || !json["stages"].is_array()) {
    throw Error(ErrorCode::kParse, "pipeline spec needs a \"stages\" array");
  }
  std::vector<StageSpec> specs;
  for (const auto &stage : json["stages"]) specs.push_back(StageSpecFromJson(stage));
  return specs;
}

void StageRegistry::Register(StageType type) {
  std::string name = type.name;
  types_.insert_or_assign(std::move(name), std::move(type));
}

bool StageRegistry::Has(const std::string &name) const {
  return types_.count(name) > 0;
}

const StageType &StageRegistry::Get(const std::string &name) const {
  auto it = types_.find(name);
  if (it == types_.end()) {
    throw Error(ErrorCode::kUnknownStageType, "no stage type registered", name);
  }
  return it->second;
}

std::vector<std::string> StageRegistry::Names() const {
  std::vector<std::string> names;
  for (const auto &[name, type] : types_) names.push_back(name);
  return names;
}

}  // namespace annoflow
