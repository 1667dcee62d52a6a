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

#ifndef ANNOFLOW_TEXT_UTF8_H_
#define ANNOFLOW_TEXT_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace annoflow::text {

struct CodePoint {
  char32_t value;
  std::size_t size;  // bytes consumed, at least 1
};

// Decodes the code point starting at byte `pos`. Invalid sequences decode as
// U+FFFD consuming one byte, so iteration always advances.
CodePoint DecodeAt(std::string_view text, std::size_t pos);

std::vector<char32_t> Decode(std::string_view text);
void AppendUtf8(std::string &out, char32_t cp);

bool IsSpace(char32_t cp);
bool IsAsciiAlnum(char32_t cp);
// Letters and digits. Non-ASCII code points count as letters unless they
// fall in a punctuation or symbol block.
bool IsAlnum(char32_t cp);
bool IsAlpha(char32_t cp);
bool IsDigit(char32_t cp);

std::string AsciiLower(std::string_view s);

}  // namespace annoflow::text

#endif  // ANNOFLOW_TEXT_UTF8_H_
