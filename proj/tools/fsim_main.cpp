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

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fermisim/amplitude.hpp"
#include "fermisim/checks.hpp"
#include "fermisim/circuit_io.hpp"
#include "fermisim/errors.hpp"
#include "fermisim/tables.hpp"

namespace {

using namespace fermisim;

// Exit codes: 0 ok, 1 parse, 2 validation, 3 numerical integrity,
// 4 oracle mismatch. Results go to stdout, diagnostics to stderr.
constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOracle = 4;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::string join_modes(const std::vector<size_t>& modes) {
    std::ostringstream os;
    for (size_t k = 0; k < modes.size(); ++k) {
        if (k) os << ',';
        os << modes[k];
    }
    return os.str();
}

std::vector<size_t> parse_mode_list(const std::string& text) {
    std::vector<size_t> modes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(item, &pos);
        } catch (const std::exception&) {
            throw ValidationError("invalid mode list entry: " + item);
        }
        if (pos != item.size()) throw ValidationError("invalid mode list entry: " + item);
        modes.push_back(value);
    }
    return modes;
}

CompiledCircuit compile_for_probability(const CircuitDocument& doc, const std::string& path) {
    if (path == "table1") return compile_circuit(doc.gates, doc.n);
    if (path == "table2") return compile_circuit_general(doc.gates, doc.n);
    return compile_circuit(doc.gates, doc.n);  // auto
}

int cmd_amplitude(const std::string& file, const std::string& in, const std::string& out) {
    const CircuitDocument doc = load_circuit_file(file);
    if (doc.adaptive) throw ValidationError("amplitude requires a plain (non-adaptive) circuit");
    const FockState x = FockState::from_string(in);
    const FockState y = FockState::from_string(out);
    const CompiledCircuit circuit = compile_circuit(doc.gates, doc.n);
    if (circuit.kind() != CircuitKind::number_conserving) {
        throw ValidationError(
            "amplitude requires a number-conserving circuit (the general path yields probabilities "
            "only)");
    }
    const Complex amp = transition_amplitude(circuit, x, y);
    std::cout << "amplitude in=" << x.to_string() << " out=" << y.to_string() << " re=" << fmt(amp.real())
              << " im=" << fmt(amp.imag()) << " prob=" << fmt(std::norm(amp)) << "\n";
    return kExitOk;
}

int cmd_prob(const std::string& file, const std::string& in, const std::string& modes_text,
             const std::string& outcome, std::string path) {
    const CircuitDocument doc = load_circuit_file(file);
    if (doc.adaptive) throw ValidationError("prob requires a plain (non-adaptive) circuit");
    const FockState x = FockState::from_string(in);
    const ModeSubset subset(doc.n, parse_mode_list(modes_text));
    std::vector<uint8_t> bits;
    for (char c : outcome) {
        if (c != '0' && c != '1') throw ValidationError("outcome must be a bitstring");
        bits.push_back(static_cast<uint8_t>(c - '0'));
    }
    const OutcomeAssignment y(subset, bits);

    if (path == "auto") {
        path = circuit_is_number_conserving(doc.gates) ? "table1" : "table2";
    }
    if (path != "table1" && path != "table2") {
        throw ValidationError("--path must be auto, table1 or table2");
    }
    const CompiledCircuit circuit = compile_for_probability(doc, path);
    const double p = (path == "table1") ? marginal_probability_nc(circuit, x, y)
                                        : marginal_probability_general(circuit, x, y);
    std::cout << "prob in=" << x.to_string() << " modes=" << join_modes(subset.modes())
              << " outcome=" << y.bits_string() << " path=" << path << " value=" << fmt(p) << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& file, const std::string& in, const std::string& modes_text,
               uint64_t shots, uint64_t seed) {
    const CircuitDocument doc = load_circuit_file(file);
    if (doc.adaptive) throw ValidationError("sample requires a plain circuit; use 'run' for adaptive");
    const FockState x = FockState::from_string(in);
    const ModeSubset subset(doc.n, parse_mode_list(modes_text));
    const CompiledCircuit circuit = compile_circuit_general(doc.gates, doc.n);
    const CMatrix t = t_matrix(circuit);

    std::map<std::string, uint64_t> counts;
    for (uint64_t s = 0; s < shots; ++s) {
        Rng rng(derive_subseed(seed, s));
        const SampledOutcome outcome = sample_subset_outcome({t}, x, {}, subset, rng);
        std::string bits(outcome.bits.size(), '0');
        for (size_t b = 0; b < outcome.bits.size(); ++b) bits[b] += outcome.bits[b];
        counts[bits]++;
    }
    for (const auto& [bits, count] : counts) {
        std::cout << "outcome bits=" << bits << " count=" << count
                  << " freq=" << fmt(static_cast<double>(count) / static_cast<double>(shots)) << "\n";
    }
    std::cout << "sample in=" << x.to_string() << " modes=" << join_modes(subset.modes())
              << " shots=" << shots << " seed=" << seed << " rng=" << kRngAlgorithm << "\n";
    return kExitOk;
}

int cmd_run(const std::string& file, const std::string& in, uint64_t seed, uint64_t shots) {
    const CircuitDocument doc = load_circuit_file(file);
    if (!doc.adaptive) throw ValidationError("run requires an adaptive circuit document");
    const AdaptiveProgram program = to_program(doc);
    const FockState x = FockState::from_string(in);

    for (uint64_t s = 0; s < shots; ++s) {
        const uint64_t shot_seed = (shots == 1) ? seed : derive_subseed(seed, s);
        const MeasurementRecord record = run_adaptive(program, x, shot_seed);
        if (shots == 1) {
            for (size_t st = 0; st < record.stages.size(); ++st) {
                const auto& stage = record.stages[st];
                std::cout << "stage index=" << st + 1
                          << " modes=" << join_modes(stage.outcome.subset().modes())
                          << " outcome=" << stage.outcome.bits_string()
                          << " conditional=" << fmt(stage.conditional_probability)
                          << " joint=" << fmt(stage.joint_probability) << "\n";
            }
        }
        std::cout << "record shot=" << s << " outcomes=" << record.outcomes_string()
                  << " joint=" << fmt(record.joint_probability()) << " seed=" << shot_seed
                  << " rng=" << record.rng_algorithm << "\n";
    }
    return kExitOk;
}

int cmd_selftest(size_t max_n, uint64_t seed, bool inject_fault) {
    const auto results = checks::run_selftest(max_n, seed, inject_fault);
    bool all_pass = true;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << "selftest suite=" << r.name << " status=" << (r.pass ? "pass" : "FAIL")
                  << " cases=" << r.cases << " worst=" << fmt(r.worst)
                  << " tolerance=" << fmt(r.tolerance);
        if (!r.detail.empty()) std::cout << " note=\"" << r.detail << "\"";
        std::cout << "\n";
    }
    std::cout << "selftest overall=" << (all_pass ? "pass" : "FAIL") << " max_n=" << max_n << "\n";
    if (!all_pass) {
        std::cerr << "error kind=oracle msg=\"selftest found disagreement with the oracle\"\n";
        return kExitOracle;
    }
    return kExitOk;
}

int cmd_bench(const std::string& sizes_text, size_t gates, uint64_t seed) {
    const std::vector<size_t> sizes = parse_mode_list(sizes_text);
    if (sizes.empty()) throw ValidationError("--sizes must list at least one mode count");
    std::cout << "n,gates,matrix_dim,compile_ms,sample_ms,total_ms\n";
    std::vector<checks::ScalingPoint> points;
    for (size_t n : sizes) {
        if (n < 2) throw ValidationError("bench sizes must be at least 2");
        const checks::ScalingPoint p = checks::scaling_point(n, gates, seed);
        points.push_back(p);
        std::cout << p.n << ',' << p.gates << ',' << p.matrix_dim << ',' << fmt(p.compile_seconds * 1e3)
                  << ',' << fmt(p.sample_seconds * 1e3) << ',' << fmt(p.total_seconds * 1e3) << "\n";
    }
    if (points.size() >= 2) {
        std::cout << "# log-log slope of total time: " << fmt(checks::log_log_slope(points)) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-fermion (matchgate) circuit simulator"};
    app.require_subcommand(1);

    std::string file, in, out, modes, outcome;
    std::string path = "auto";
    std::string sizes = "32,64,128,256";
    uint64_t seed = 1;
    uint64_t shots = 1;
    size_t max_n = 8;
    size_t gates = 2048;
    bool inject_fault = false;

    auto* amplitude = app.add_subcommand("amplitude", "transition amplitude <out|U|in>");
    amplitude->add_option("-c,--circuit", file, "circuit file")->required();
    amplitude->add_option("-x,--in", in, "input occupation bitstring")->required();
    amplitude->add_option("-y,--out", out, "output occupation bitstring")->required();

    auto* prob = app.add_subcommand("prob", "marginal probability of a subset outcome");
    prob->add_option("-c,--circuit", file)->required();
    prob->add_option("-x,--in", in)->required();
    prob->add_option("-m,--modes", modes, "measured modes, e.g. 0,2")->required();
    prob->add_option("-o,--outcome", outcome, "outcome bits aligned with --modes")->required();
    prob->add_option("--path", path, "auto|table1|table2");

    auto* sample = app.add_subcommand("sample", "sample measurement outcomes of a subset");
    sample->add_option("-c,--circuit", file)->required();
    sample->add_option("-x,--in", in)->required();
    sample->add_option("-m,--modes", modes)->required();
    sample->add_option("-s,--shots", shots);
    sample->add_option("--seed", seed);

    auto* run = app.add_subcommand("run", "run an adaptive staged program");
    run->add_option("-c,--circuit", file)->required();
    run->add_option("-x,--in", in)->required();
    run->add_option("--seed", seed);
    run->add_option("-s,--shots", shots);

    auto* selftest = app.add_subcommand("selftest", "verify the engines against the dense oracle");
    selftest->add_option("--max-n", max_n, "largest mode count exercised");
    selftest->add_option("--seed", seed);
    selftest->add_flag("--inject-fault", inject_fault,
                       "add a deliberately failing control suite (harness self-test)");

    auto* bench = app.add_subcommand("bench", "wall-time scaling of the Pfaffian sampling path");
    bench->add_option("--sizes", sizes, "comma-separated mode counts");
    bench->add_option("--gates", gates, "random general gates per circuit");
    bench->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error kind=parse msg=\"" << e.what() << "\"\n";
        return kExitParse;
    }

    try {
        if (app.got_subcommand(amplitude)) return cmd_amplitude(file, in, out);
        if (app.got_subcommand(prob)) return cmd_prob(file, in, modes, outcome, path);
        if (app.got_subcommand(sample)) return cmd_sample(file, in, modes, shots, seed);
        if (app.got_subcommand(run)) return cmd_run(file, in, seed, shots);
        if (app.got_subcommand(selftest)) return cmd_selftest(max_n, seed, inject_fault);
        if (app.got_subcommand(bench)) return cmd_bench(sizes, gates, seed);
    } catch (const ParseError& e) {
        std::cerr << "error kind=parse msg=\"" << e.what() << "\"\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "error kind=validation msg=\"" << e.what() << "\"\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "error kind=numerical msg=\"" << e.what() << "\"\n";
        return kExitNumerical;
    } catch (const OracleMismatchError& e) {
        std::cerr << "error kind=oracle msg=\"" << e.what() << "\"\n";
        return kExitOracle;
    } catch (const Error& e) {
        std::cerr << "error kind=internal msg=\"" << e.what() << "\"\n";
        return kExitNumerical;
    }
    return kExitOk;
}
