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

#include "annoflow/core/jsonl.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "annoflow/core/error.h"

namespace annoflow {

Json AnnotationToJson(const Annotation &annotation) {
  Json out = {
      {"kind", KindName(annotation.kind)},
      {"begin", annotation.begin},
      {"end", annotation.end},
      {"result", annotation.result},
      {"metadata", annotation.metadata},
  };
  if (annotation.vector) out["vector"] = *annotation.vector;
  return out;
}

Annotation AnnotationFromJson(const Json &json) {
  try {
    Annotation a;
    a.kind = ParseKind(json.at("kind").get<std::string>());
    a.begin = json.at("begin").get<std::size_t>();
    a.end = json.at("end").get<std::size_t>();
    a.result = json.at("result").get<std::string>();
    if (auto it = json.find("metadata"); it != json.end()) {
      a.metadata = it->get<std::map<std::string, std::string>>();
    }
    if (auto it = json.find("vector"); it != json.end() && !it->is_null()) {
      a.vector = it->get<std::vector<float>>();
    }
    if (a.end < a.begin) {
      throw Error(ErrorCode::kParse, "annotation end precedes begin");
    }
    return a;
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad annotation: ") + e.what());
  }
}

Json RecordToJson(const DocumentRecord &record) {
  Json columns = Json::object();
  for (const auto &[name, column] : record.columns) {
    Json list = Json::array();
    for (const auto &a : column) list.push_back(AnnotationToJson(a));
    columns[name] = std::move(list);
  }
  Json out = {{"id", record.id}, {"text", record.text}, {"columns", columns}};
  if (record.error) out["error"] = *record.error;
  return out;
}

DocumentRecord RecordFromJson(const Json &json) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kParse, "record must be a JSON object");
  }
  DocumentRecord record;
  try {
    record.id = json.at("id").get<std::string>();
    record.text = json.at("text").get<std::string>();
    if (auto it = json.find("columns"); it != json.end()) {
      for (const auto &[name, list] : it->items()) {
        Column column;
        for (const auto &a : list) column.push_back(AnnotationFromJson(a));
        record.columns.emplace(name, std::move(column));
      }
    }
    if (auto it = json.find("error"); it != json.end() && !it->is_null()) {
      record.error = it->get<std::string>();
    }
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad record: ") + e.what());
  }
  return record;
}

std::string SerializeRecord(const DocumentRecord &record) {
  return RecordToJson(record).dump();
}

std::string SerializeFrame(const Frame &frame) {
  std::ostringstream out;
  WriteFrame(frame, out);
  return out.str();
}

DocumentRecord ParseRecordLine(const std::string &line, std::size_t line_no) {
  DocumentRecord record;
  record.id = "line-" + std::to_string(line_no);
  Json json = Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) {
    record.error = "malformed JSON at line " + std::to_string(line_no);
    return record;
  }
  try {
    return RecordFromJson(json);
  } catch (const Error &e) {
    if (json.is_object()) {
      if (auto it = json.find("id"); it != json.end() && it->is_string()) {
        record.id = it->get<std::string>();
      }
    }
    record.error = e.what();
    return record;
  }
}

Frame ReadFrame(std::istream &in) {
  Frame frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    frame.records.push_back(ParseRecordLine(line, line_no));
  }
  frame.schema = InferSchema(frame.records);
  return frame;
}

Frame ReadFrameFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  return ReadFrame(in);
}

void WriteFrame(const Frame &frame, std::ostream &out) {
  for (const auto &record : frame.records) out << SerializeRecord(record) << '\n';
}

void WriteFrameFile(const Frame &frame, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
  WriteFrame(frame, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed", path.string());
}

}  // namespace annoflow
