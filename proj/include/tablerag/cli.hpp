/*
 * Copyright 2026 The tablerag-cpp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tablerag/lm.hpp"
#include "tablerag/retrieval.hpp"

namespace tablerag {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,         // bad flags or config, I/O and format errors
    kExitSolveFailed = 2,   // no usable final answer
    kExitRemoteFailed = 3,  // LM endpoint failed or the playback script ran out
};

/// Settings shared by every subcommand. Precedence: flag, then config file,
/// then these defaults.
struct RunConfig {
    std::size_t k = 5;
    std::size_t budget = 10000;
    std::size_t baseline_k = 30;
    std::size_t n_votes = 10;
    RetrievalMode mode = RetrievalMode::embed;
    double hybrid_weight = 0.5;
    std::size_t max_steps = 10;
    double temperature = 0.8;
    std::size_t context_limit_tokens = 16000;
    std::uint64_t seed = 0;
    std::string mock_lm;  // playback script path
    bool mock_encoder = false;
    bool trace = false;
    LmEndpointConfig lm;
    LmEndpointConfig encoder;
};

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tablerag
