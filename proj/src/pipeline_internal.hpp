// Copyright 2026 The AmbigNLG Toolkit Authors.
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

#pragma once

#include <string>
#include <vector>

#include "ambig/pipeline.hpp"

namespace ambig::pipeline::detail {

void log(const PipelineConfig& config, const std::string& msg);

// Sets model, temperature, sample count, token limit and seed.
llm::ChatRequest with_model(llm::ChatRequest r, const std::string& model, double temperature,
                            int n, const PipelineConfig& config);

// N downstream samples for `instruction` on the instance input.
std::vector<std::string> sample_outputs(llm::PromptKind kind, const std::string& instruction,
                                        const TaskInstance& instance, llm::Gateway& gateway,
                                        const PipelineConfig& config);

std::vector<double> rouge_scores(const std::vector<std::string>& outputs,
                                 const std::string& reference);

// Trims, collapses whitespace, drops echoed labels and enclosing quotes.
std::string normalize_response(std::string_view response);

}  // namespace ambig::pipeline::detail
