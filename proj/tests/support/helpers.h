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

#ifndef ANNOFLOW_TESTS_SUPPORT_HELPERS_H_
#define ANNOFLOW_TESTS_SUPPORT_HELPERS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "annoflow/core/error.h"
#include "annoflow/core/frame.h"

namespace testing {

inline std::filesystem::path DataPath(const std::string &name) {
  return std::filesystem::path(ANNOFLOW_TEST_DATA_DIR) / name;
}

// Fresh empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string &tag);

// The engine error thrown by `fn`, or nullopt when it returns normally.
template <typename F>
std::optional<annoflow::Error> CatchError(F &&fn) {
  try {
    fn();
  } catch (const annoflow::Error &e) {
    return e;
  }
  return std::nullopt;
}

inline annoflow::DocumentRecord Record(std::string id, std::string text) {
  annoflow::DocumentRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  return r;
}

inline annoflow::Frame FrameOf(const std::vector<std::string> &texts) {
  annoflow::Frame f;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    f.records.push_back(Record("d" + std::to_string(i), texts[i]));
  }
  return f;
}

std::vector<std::string> Results(const annoflow::Column &column);

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected_code)                          \
  do {                                                                 \
    auto caught_ = ::testing::CatchError([&] { (void)(expr); });       \
    CHECK_MESSAGE(caught_.has_value(), "no error thrown by " #expr);   \
    if (caught_) CHECK(caught_->code() == (expected_code));            \
  } while (0)

#endif  // ANNOFLOW_TESTS_SUPPORT_HELPERS_H_
