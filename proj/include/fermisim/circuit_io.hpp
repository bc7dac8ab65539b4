/*
 * Copyright 2026 The fermisim authors
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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fermisim/adaptive.hpp"
#include "fermisim/gates.hpp"

namespace fermisim {

/// One stage of an adaptive document. Gates and the measured subset are
/// either fixed or selected from a decision table keyed by the
/// concatenated outcome bits of all earlier stages (mode-ascending within
/// each stage, stages in order).
struct StageSpec {
    std::optional<std::vector<GateSpec>> gates;
    std::map<std::string, std::vector<GateSpec>> gates_by_outcome;
    std::optional<std::vector<size_t>> measure;
    std::map<std::string, std::vector<size_t>> measure_by_outcome;
};

/// Parsed circuit document (schema_version 1). Carries either a plain gate
/// list or an adaptive staged program, never both.
struct CircuitDocument {
    int schema_version = 1;
    size_t n = 0;
    std::vector<GateSpec> gates;
    bool adaptive = false;
    std::vector<StageSpec> stages;
};

/// Parses and validates a JSON circuit document. JSON syntax errors throw
/// ParseError (with byte positions); schema and semantic violations throw
/// ValidationError. Adaptive documents are validated exhaustively: every
/// reachable outcome prefix must have decision-table entries, subsets must
/// retire modes, and no gate may touch a measured mode.
CircuitDocument parse_circuit(const std::string& text);

CircuitDocument load_circuit_file(const std::string& path);

/// Builds the runnable program for an adaptive document.
AdaptiveProgram to_program(const CircuitDocument& doc);

}  // namespace fermisim
