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

#ifndef ANNOFLOW_NER_BIO_DECODER_H_
#define ANNOFLOW_NER_BIO_DECODER_H_

#include <span>
#include <string>
#include <vector>

namespace annoflow::ner {

// Viterbi decoding under a hard BIO transition mask: a sequence starts with
// O or B-*, and I-X only follows B-X or I-X. The path maximizes the summed
// per-token scores; ties go to the label earlier in the inventory. Returns
// label indices.
std::vector<std::size_t> DecodeBioIndices(const std::vector<std::vector<double>> &scores,
                                          std::span<const std::string> inventory);

std::vector<std::string> DecodeBio(const std::vector<std::vector<double>> &scores,
                                   std::span<const std::string> inventory);

}  // namespace annoflow::ner

#endif  // ANNOFLOW_NER_BIO_DECODER_H_
