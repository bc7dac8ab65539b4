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

#include "fermisim/circuit_io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "fermisim/errors.hpp"

namespace fermisim {

namespace {

using nlohmann::json;

[[noreturn]] void fail_validation(const std::string& context, const std::string& what) {
    throw ValidationError(context.empty() ? what : context + ": " + what);
}

double require_number(const json& j, const char* key, const std::string& ctx, double fallback,
                      bool required) {
    if (!j.contains(key)) {
        if (required) fail_validation(ctx, std::string("missing field '") + key + "'");
        return fallback;
    }
    if (!j[key].is_number()) fail_validation(ctx, std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

Complex parse_complex(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) return Complex(0, 0);
    const json& v = j[key];
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return Complex(v[0].get<double>(), v[1].get<double>());
    }
    fail_validation(ctx, std::string("field '") + key + "' must be a number or [re, im] pair");
}

std::pair<size_t, size_t> parse_modes(const json& j, const std::string& ctx, size_t n) {
    if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].size() != 2) {
        fail_validation(ctx, "field 'modes' must be a pair of mode indices");
    }
    for (const auto& v : j["modes"]) {
        if (!v.is_number_unsigned()) fail_validation(ctx, "mode indices must be non-negative integers");
    }
    const auto i = j["modes"][0].get<size_t>();
    const auto k = j["modes"][1].get<size_t>();
    if (i >= n || k >= n) fail_validation(ctx, "mode index out of range");
    if (i == k) fail_validation(ctx, "gate modes must be distinct");
    return {i, k};
}

GateSpec parse_gate(const json& j, const std::string& ctx, size_t n) {
    if (!j.is_object()) fail_validation(ctx, "gate must be an object");
    if (!j.contains("type") || !j["type"].is_string()) {
        fail_validation(ctx, "gate needs a string 'type'");
    }
    const std::string type = j["type"].get<std::string>();
    const auto [i, k] = parse_modes(j, ctx, n);

    if (type == "pauli") {
        if (k != i + 1) {
            fail_validation(ctx,
                            "pauli gates must act on adjacent modes (i, i+1); express non-adjacent "
                            "interactions as number_conserving or general_quadratic gates");
        }
        PauliGateSpec g;
        g.qubit = i;
        g.a1 = require_number(j, "a1", ctx, 0.0, false);
        g.b1 = require_number(j, "b1", ctx, 0.0, false);
        g.a2 = require_number(j, "a2", ctx, 0.0, false);
        g.b2 = require_number(j, "b2", ctx, 0.0, false);
        g.a3 = require_number(j, "a3", ctx, 0.0, false);
        g.b3 = require_number(j, "b3", ctx, 0.0, false);
        g.validate(n);
        return g;
    }
    if (type == "number_conserving") {
        NumberConservingGateSpec g;
        g.mode_i = i;
        g.mode_j = k;
        g.b_ii = require_number(j, "b_ii", ctx, 0.0, false);
        g.b_jj = require_number(j, "b_jj", ctx, 0.0, false);
        g.b_ij = parse_complex(j, "b_ij", ctx);
        g.validate(n);
        return g;
    }
    if (type == "general_quadratic") {
        GeneralQuadraticGateSpec g;
        g.mode_i = i;
        g.mode_j = k;
        if (!j.contains("alpha") || !j["alpha"].is_array() || j["alpha"].size() != 4) {
            fail_validation(ctx, "field 'alpha' must be a 4x4 array");
        }
        for (int r = 0; r < 4; ++r) {
            const json& row = j["alpha"][static_cast<size_t>(r)];
            if (!row.is_array() || row.size() != 4) fail_validation(ctx, "field 'alpha' must be a 4x4 array");
            for (int c = 0; c < 4; ++c) {
                const json& v = row[static_cast<size_t>(c)];
                if (!v.is_number()) fail_validation(ctx, "alpha entries must be numbers");
                g.alpha(r, c) = v.get<double>();
            }
        }
        try {
            g.validate(n);
        } catch (const ValidationError& e) {
            fail_validation(ctx, e.what());
        }
        return g;
    }
    fail_validation(ctx, "unknown gate type '" + type + "'");
}

std::vector<GateSpec> parse_gate_list(const json& j, const std::string& ctx, size_t n) {
    if (!j.is_array()) fail_validation(ctx, "gate list must be an array");
    std::vector<GateSpec> gates;
    for (size_t g = 0; g < j.size(); ++g) {
        std::ostringstream sub;
        sub << ctx << " gate " << g + 1;
        gates.push_back(parse_gate(j[g], sub.str(), n));
    }
    return gates;
}

std::vector<size_t> parse_mode_list(const json& j, const std::string& ctx, size_t n) {
    if (!j.is_array()) fail_validation(ctx, "measured subset must be an array of modes");
    std::vector<size_t> modes;
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) fail_validation(ctx, "subset modes must be non-negative integers");
        modes.push_back(v.get<size_t>());
    }
    try {
        ModeSubset(n, modes);
    } catch (const ValidationError& e) {
        fail_validation(ctx, e.what());
    }
    return modes;
}

bool is_bitstring(const std::string& s) {
    for (char c : s) {
        if (c != '0' && c != '1') return false;
    }
    return true;
}

StageSpec parse_stage(const json& j, const std::string& ctx, size_t n) {
    if (!j.is_object()) fail_validation(ctx, "stage must be an object");
    StageSpec stage;

    const bool has_gates = j.contains("gates");
    const bool has_gate_table = j.contains("gates_by_outcome");
    if (has_gates && has_gate_table) {
        fail_validation(ctx, "use either 'gates' or 'gates_by_outcome', not both");
    }
    if (has_gates) stage.gates = parse_gate_list(j["gates"], ctx, n);
    if (has_gate_table) {
        if (!j["gates_by_outcome"].is_object()) fail_validation(ctx, "'gates_by_outcome' must be an object");
        for (const auto& [key, value] : j["gates_by_outcome"].items()) {
            if (!is_bitstring(key)) fail_validation(ctx, "decision-table key '" + key + "' is not a bitstring");
            stage.gates_by_outcome[key] = parse_gate_list(value, ctx + " [" + key + "]", n);
        }
    }
    if (!has_gates && !has_gate_table) stage.gates = std::vector<GateSpec>{};

    const bool has_measure = j.contains("measure");
    const bool has_measure_table = j.contains("measure_by_outcome");
    if (has_measure == has_measure_table) {
        fail_validation(ctx, "stage needs exactly one of 'measure' or 'measure_by_outcome'");
    }
    if (has_measure) stage.measure = parse_mode_list(j["measure"], ctx, n);
    if (has_measure_table) {
        if (!j["measure_by_outcome"].is_object()) fail_validation(ctx, "'measure_by_outcome' must be an object");
        for (const auto& [key, value] : j["measure_by_outcome"].items()) {
            if (!is_bitstring(key)) fail_validation(ctx, "decision-table key '" + key + "' is not a bitstring");
            stage.measure_by_outcome[key] = parse_mode_list(value, ctx + " [" + key + "]", n);
        }
    }
    return stage;
}

// Walks every combinatorial outcome path, checking decision-table
// totality, subset retirement and gate/measured-mode conflicts.
void validate_adaptive_paths(const CircuitDocument& doc) {
    struct Frame {
        std::string key;
        std::vector<bool> measured;
    };
    size_t visited = 0;

    std::function<void(size_t, const Frame&)> walk = [&](size_t s, const Frame& frame) {
        if (s == doc.stages.size()) return;
        std::ostringstream ctx;
        ctx << "stage " << s + 1;
        const StageSpec& stage = doc.stages[s];

        const std::vector<GateSpec>* gates = nullptr;
        if (stage.gates.has_value()) {
            gates = &*stage.gates;
        } else {
            const auto it = stage.gates_by_outcome.find(frame.key);
            if (it == stage.gates_by_outcome.end()) {
                fail_validation(ctx.str(),
                                "gates_by_outcome has no entry for reachable outcome prefix \"" +
                                    frame.key + "\"");
            }
            gates = &it->second;
        }
        for (size_t g = 0; g < gates->size(); ++g) {
            const auto [i, k] = gate_modes((*gates)[g]);
            for (size_t m : {i, k}) {
                if (frame.measured[m]) {
                    std::ostringstream msg;
                    msg << "gate " << g + 1 << " acts on measured mode " << m
                        << " (outcome prefix \"" << frame.key << "\")";
                    fail_validation(ctx.str(), msg.str());
                }
            }
        }

        const std::vector<size_t>* measure = nullptr;
        if (stage.measure.has_value()) {
            measure = &*stage.measure;
        } else {
            const auto it = stage.measure_by_outcome.find(frame.key);
            if (it == stage.measure_by_outcome.end()) {
                fail_validation(ctx.str(),
                                "measure_by_outcome has no entry for reachable outcome prefix \"" +
                                    frame.key + "\"");
            }
            measure = &it->second;
        }
        for (size_t m : *measure) {
            if (frame.measured[m]) {
                std::ostringstream msg;
                msg << "mode " << m << " is measured twice (outcome prefix \"" << frame.key << "\")";
                fail_validation(ctx.str(), msg.str());
            }
        }

        const size_t k = measure->size();
        if ((visited += (size_t{1} << k)) > (size_t{1} << 16)) {
            fail_validation("adaptive section", "decision tables too large to validate exhaustively");
        }
        for (uint64_t word = 0; word < (uint64_t{1} << k); ++word) {
            Frame next = frame;
            for (size_t b = 0; b < k; ++b) {
                next.key += static_cast<char>('0' + ((word >> (k - 1 - b)) & 1u));
            }
            for (size_t m : *measure) next.measured[m] = true;
            walk(s + 1, next);
        }
    };

    walk(0, Frame{"", std::vector<bool>(doc.n, false)});
}

}  // namespace

CircuitDocument parse_circuit(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!j.is_object()) throw ValidationError("circuit document must be a JSON object");

    CircuitDocument doc;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw ValidationError("missing integer field 'schema_version'");
    }
    doc.schema_version = j["schema_version"].get<int>();
    if (doc.schema_version != 1) {
        std::ostringstream msg;
        msg << "unsupported schema_version " << doc.schema_version << " (expected 1)";
        throw ValidationError(msg.str());
    }
    if (!j.contains("n") || !j["n"].is_number_unsigned() || j["n"].get<size_t>() == 0) {
        throw ValidationError("field 'n' must be a positive mode count");
    }
    doc.n = j["n"].get<size_t>();

    const bool has_gates = j.contains("gates");
    const bool has_adaptive = j.contains("adaptive");
    if (has_gates == has_adaptive) {
        throw ValidationError("document needs exactly one of 'gates' or 'adaptive'");
    }

    if (has_gates) {
        doc.gates = parse_gate_list(j["gates"], "circuit", doc.n);
        return doc;
    }

    doc.adaptive = true;
    const json& a = j["adaptive"];
    if (!a.is_object() || !a.contains("stages") || !a["stages"].is_array() || a["stages"].empty()) {
        throw ValidationError("'adaptive' must contain a non-empty 'stages' array");
    }
    for (size_t s = 0; s < a["stages"].size(); ++s) {
        std::ostringstream ctx;
        ctx << "stage " << s + 1;
        doc.stages.push_back(parse_stage(a["stages"][s], ctx.str(), doc.n));
    }
    validate_adaptive_paths(doc);
    return doc;
}

CircuitDocument load_circuit_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open circuit file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_circuit(buf.str());
}

AdaptiveProgram to_program(const CircuitDocument& doc) {
    if (!doc.adaptive) throw ValidationError("document has no adaptive section");
    std::vector<AdaptiveProgram::Stage> stages;
    for (const StageSpec& spec : doc.stages) {
        AdaptiveProgram::Stage stage;
        const size_t n = doc.n;
        stage.segment = [spec, n](const MeasurementRecord& record) -> std::vector<GateSpec> {
            if (spec.gates.has_value()) return *spec.gates;
            const auto it = spec.gates_by_outcome.find(record.outcome_key());
            if (it == spec.gates_by_outcome.end()) {
                throw ValidationError("gates_by_outcome has no entry for outcome prefix \"" +
                                      record.outcome_key() + "\"");
            }
            return it->second;
        };
        stage.subset = [spec, n](const MeasurementRecord& record) -> ModeSubset {
            if (spec.measure.has_value()) return ModeSubset(n, *spec.measure);
            const auto it = spec.measure_by_outcome.find(record.outcome_key());
            if (it == spec.measure_by_outcome.end()) {
                throw ValidationError("measure_by_outcome has no entry for outcome prefix \"" +
                                      record.outcome_key() + "\"");
            }
            return ModeSubset(n, it->second);
        };
        stages.push_back(std::move(stage));
    }
    return AdaptiveProgram(doc.n, std::move(stages));
}

}  // namespace fermisim
