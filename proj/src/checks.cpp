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

#include "fermisim/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fermisim/amplitude.hpp"
#include "fermisim/circuit.hpp"
#include "fermisim/errors.hpp"
#include "fermisim/oracle.hpp"
#include "fermisim/tables.hpp"

namespace fermisim::checks {

namespace {

double uniform_pm1(Rng& rng) {
    return 2.0 * rng.uniform01() - 1.0;
}

std::pair<size_t, size_t> random_mode_pair(Rng& rng, size_t n) {
    const size_t i = rng.next_u64() % n;
    size_t j = rng.next_u64() % n;
    while (j == i) j = rng.next_u64() % n;
    return {i, j};
}

struct Tally {
    double worst = 0.0;
    size_t cases = 0;
    void observe(double err) {
        worst = std::max(worst, err);
        ++cases;
    }
};

CheckResult finish(const std::string& name, const Tally& tally, double tolerance,
                   const std::string& detail = "") {
    CheckResult r;
    r.name = name;
    r.pass = tally.worst <= tolerance;
    r.worst = tally.worst;
    r.tolerance = tolerance;
    r.cases = tally.cases;
    r.detail = detail;
    return r;
}

}  // namespace

NumberConservingGateSpec random_nc_gate(Rng& rng, size_t n) {
    const auto [i, j] = random_mode_pair(rng, n);
    NumberConservingGateSpec g;
    g.mode_i = i;
    g.mode_j = j;
    g.b_ii = uniform_pm1(rng);
    g.b_jj = uniform_pm1(rng);
    g.b_ij = Complex(uniform_pm1(rng), uniform_pm1(rng));
    return g;
}

GeneralQuadraticGateSpec random_general_gate(Rng& rng, size_t n) {
    const auto [i, j] = random_mode_pair(rng, n);
    GeneralQuadraticGateSpec g;
    g.mode_i = i;
    g.mode_j = j;
    for (int r = 0; r < 4; ++r) {
        for (int c = r + 1; c < 4; ++c) {
            const double v = uniform_pm1(rng);
            g.alpha(r, c) = v;
            g.alpha(c, r) = -v;
        }
    }
    return g;
}

PauliGateSpec random_balanced_pauli(Rng& rng, size_t n) {
    PauliGateSpec g;
    g.qubit = rng.next_u64() % (n - 1);
    g.a1 = uniform_pm1(rng);
    g.b1 = uniform_pm1(rng);
    g.a2 = g.b2 = uniform_pm1(rng);
    g.a3 = uniform_pm1(rng);
    g.b3 = -g.a3;
    return g;
}

std::vector<GateSpec> random_nc_circuit(Rng& rng, size_t n, size_t max_gates) {
    const size_t count = 1 + rng.next_u64() % max_gates;
    std::vector<GateSpec> gates;
    for (size_t g = 0; g < count; ++g) {
        if (n >= 2 && rng.next_u64() % 4 == 0) {
            gates.emplace_back(random_balanced_pauli(rng, n));
        } else {
            gates.emplace_back(random_nc_gate(rng, n));
        }
    }
    return gates;
}

std::vector<GateSpec> random_general_circuit(Rng& rng, size_t n, size_t max_gates) {
    const size_t count = 1 + rng.next_u64() % max_gates;
    std::vector<GateSpec> gates;
    for (size_t g = 0; g < count; ++g) {
        switch (rng.next_u64() % 3) {
            case 0:
                gates.emplace_back(random_nc_gate(rng, n));
                break;
            case 1: {
                PauliGateSpec p = random_balanced_pauli(rng, n);
                p.b2 = uniform_pm1(rng);  // unbalance: pairing terms
                p.b3 = uniform_pm1(rng);
                gates.emplace_back(p);
                break;
            }
            default:
                gates.emplace_back(random_general_gate(rng, n));
                break;
        }
    }
    return gates;
}

FockState random_state(Rng& rng, size_t n) {
    std::vector<uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1u);
    return FockState(bits);
}

OutcomeAssignment random_assignment(Rng& rng, size_t n, size_t k) {
    std::vector<size_t> pool(n);
    for (size_t m = 0; m < n; ++m) pool[m] = m;
    for (size_t m = n; m > 1; --m) std::swap(pool[m - 1], pool[rng.next_u64() % m]);
    std::vector<size_t> modes(pool.begin(), pool.begin() + static_cast<long>(k));
    std::sort(modes.begin(), modes.end());
    std::vector<uint8_t> bits(k);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1u);
    return OutcomeAssignment(ModeSubset(n, modes), bits);
}

AdaptiveProgram random_two_stage_program(Rng& rng, size_t n) {
    const auto seg1 = random_general_circuit(rng, n, 6);
    const size_t k1 = 1 + rng.next_u64() % 2;
    const auto s1 = random_assignment(rng, n, k1).subset();

    // Second-stage gates avoid the measured modes; two alternative segments
    // keyed on the parity of the first outcome.
    std::vector<size_t> free_modes;
    for (size_t m = 0; m < n; ++m) {
        if (!s1.contains(m)) free_modes.push_back(m);
    }
    auto random_free_circuit = [&](size_t max_gates) {
        std::vector<GateSpec> gates;
        if (free_modes.size() < 2) return gates;  // no two-mode gate fits
        const size_t count = 1 + rng.next_u64() % max_gates;
        for (size_t g = 0; g < count; ++g) {
            const size_t i = free_modes[rng.next_u64() % free_modes.size()];
            size_t j = free_modes[rng.next_u64() % free_modes.size()];
            while (j == i) j = free_modes[rng.next_u64() % free_modes.size()];
            GeneralQuadraticGateSpec gq = random_general_gate(rng, n);
            gq.mode_i = i;
            gq.mode_j = j;
            gates.emplace_back(gq);
        }
        return gates;
    };
    const auto seg2_even = random_free_circuit(4);
    const auto seg2_odd = random_free_circuit(4);

    const size_t k2 = std::min(free_modes.size(), size_t{1} + rng.next_u64() % 2);
    std::vector<size_t> m2(free_modes.begin(), free_modes.begin() + static_cast<long>(k2));
    const ModeSubset s2(n, m2);

    std::vector<AdaptiveProgram::Stage> stages;
    stages.push_back(AdaptiveProgram::fixed_stage(seg1, s1));
    stages.push_back(AdaptiveProgram::Stage{
        [seg2_even, seg2_odd](const MeasurementRecord& r) {
            size_t ones = 0;
            for (char c : r.outcome_key()) ones += (c == '1');
            return (ones % 2 == 0) ? seg2_even : seg2_odd;
        },
        [s2](const MeasurementRecord&) { return s2; },
    });
    return AdaptiveProgram(n, std::move(stages));
}

CheckResult check_amplitude_oracle(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (max_n - 1);
        const auto gates = random_nc_circuit(rng, n, 30);
        const CompiledCircuit compiled = compile_circuit(gates, n);
        for (int rep = 0; rep < 4; ++rep) {
            const FockState x = random_state(rng, n);
            const FockState y = random_state(rng, n);
            const Complex got = transition_amplitude(compiled, x, y);
            const Complex want = oracle_amplitude(gates, x, y);
            tally.observe(std::abs(got - want));
        }
    }
    return finish("amplitude_oracle", tally, 1e-9);
}

CheckResult check_weight_superselection(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (max_n - 1);
        const CompiledCircuit compiled = compile_circuit(random_nc_circuit(rng, n, 30), n);
        for (int rep = 0; rep < 6; ++rep) {
            const FockState x = random_state(rng, n);
            const FockState y = random_state(rng, n);
            if (x.hamming_weight() == y.hamming_weight()) continue;
            // Exact zero across weight sectors, not merely small.
            const Complex amp = transition_amplitude(compiled, x, y);
            tally.observe(amp == Complex(0.0, 0.0) ? 0.0 : 1.0);
        }
    }
    return finish("weight_superselection", tally, 0.0);
}

CheckResult check_parity_superselection(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    const size_t cap = std::min<size_t>(max_n, 6);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (cap - 1);
        const auto gates = random_general_circuit(rng, n, 12);
        const CompiledCircuit compiled = compile_circuit_general(gates, n);
        const FockState x = random_state(rng, n);
        std::vector<size_t> all(n);
        for (size_t m = 0; m < n; ++m) all[m] = m;
        double wrong_mass = 0.0;
        for (uint64_t idx = 0; idx < (uint64_t{1} << n); ++idx) {
            const FockState y = FockState::from_index(idx, n);
            if (parity(y) == parity(x)) continue;
            std::vector<uint8_t> bits(n);
            for (size_t m = 0; m < n; ++m) bits[m] = y.occupied(m) ? 1 : 0;
            wrong_mass +=
                marginal_probability_general(compiled, x, OutcomeAssignment(ModeSubset(n, all), bits));
        }
        tally.observe(wrong_mass);
    }
    return finish("parity_superselection", tally, 1e-10);
}

CheckResult check_marginals_nc(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (max_n - 1);
        const auto gates = random_nc_circuit(rng, n, 20);
        const CompiledCircuit compiled = compile_circuit(gates, n);
        const FockState x = random_state(rng, n);
        for (int rep = 0; rep < 3; ++rep) {
            const auto y = random_assignment(rng, n, 1 + rng.next_u64() % n);
            const double got = marginal_probability_nc(compiled, x, y);
            const double want = oracle_marginal(gates, x, y);
            tally.observe(std::abs(got - want));
        }
    }
    return finish("marginals_table1", tally, 1e-9);
}

CheckResult check_marginals_general(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (max_n - 1);
        const auto gates = random_general_circuit(rng, n, 20);
        const CompiledCircuit compiled = compile_circuit_general(gates, n);
        const FockState x = random_state(rng, n);
        for (int rep = 0; rep < 3; ++rep) {
            const auto y = random_assignment(rng, n, 1 + rng.next_u64() % n);
            const double got = marginal_probability_general(compiled, x, y);
            const double want = oracle_marginal(gates, x, y);
            tally.observe(std::abs(got - want));
        }
    }
    return finish("marginals_table2", tally, 1e-9);
}

CheckResult check_dual_path(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (max_n - 1);
        const auto gates = random_nc_circuit(rng, n, 20);
        const CompiledCircuit nc = compile_circuit(gates, n);
        const CompiledCircuit gen = compile_circuit_general(gates, n);
        const FockState x = random_state(rng, n);
        for (int rep = 0; rep < 3; ++rep) {
            const auto y = random_assignment(rng, n, 1 + rng.next_u64() % n);
            tally.observe(std::abs(marginal_probability_nc(nc, x, y) -
                                   marginal_probability_general(gen, x, y)));
        }
    }
    return finish("dual_path", tally, 1e-9);
}

CheckResult check_normalization(size_t max_n, size_t circuits, uint64_t seed) {
    Rng rng(seed);
    const size_t cap = std::min<size_t>(max_n, 6);
    Tally tally;
    for (size_t c = 0; c < circuits; ++c) {
        const size_t n = 2 + c % (cap - 1);
        const auto gates = random_general_circuit(rng, n, 12);
        const CompiledCircuit compiled = compile_circuit_general(gates, n);
        const FockState x = random_state(rng, n);
        const size_t k = 1 + rng.next_u64() % n;
        const auto base = random_assignment(rng, n, k);

        double total = 0.0;
        for (uint64_t w = 0; w < (uint64_t{1} << k); ++w) {
            std::vector<uint8_t> bits(k);
            for (size_t b = 0; b < k; ++b) bits[b] = static_cast<uint8_t>((w >> (k - 1 - b)) & 1u);
            total += marginal_probability_general(compiled, x, OutcomeAssignment(base.subset(), bits));
        }
        tally.observe(std::abs(total - 1.0));

        // Extension consistency over an unmeasured mode, when one exists.
        if (k < n) {
            size_t extra = 0;
            while (base.subset().contains(extra)) ++extra;
            std::vector<size_t> modes = base.subset().modes();
            modes.push_back(extra);
            std::sort(modes.begin(), modes.end());
            const size_t pos =
                static_cast<size_t>(std::find(modes.begin(), modes.end(), extra) - modes.begin());
            double rhs = 0.0;
            for (uint8_t b : {0, 1}) {
                std::vector<uint8_t> bits = base.bits();
                bits.insert(bits.begin() + static_cast<long>(pos), b);
                rhs += marginal_probability_general(compiled, x,
                                                    OutcomeAssignment(ModeSubset(n, modes), bits));
            }
            tally.observe(std::abs(marginal_probability_general(compiled, x, base) - rhs));
        }
    }
    return finish("normalization_consistency", tally, 1e-9);
}

CheckResult check_pfaffian_kernel(size_t instances, uint64_t seed) {
    Rng rng(seed);
    Tally tally;
    for (size_t c = 0; c < instances; ++c) {
        const Eigen::Index m = 2 * (1 + static_cast<Eigen::Index>(rng.next_u64() % 20));  // up to 40
        CMatrix a(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            a(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const Complex v(uniform_pm1(rng), uniform_pm1(rng));
                a(i, j) = v;
                a(j, i) = -v;
            }
        }
        const Complex pf = pfaffian(a);
        const Complex det = determinant(a);
        tally.observe(std::abs(pf * pf - det) / std::max(1e-300, std::abs(det)));
    }

    // Odd dimensions are exactly zero; closed forms are exact.
    Rng rng2(seed + 1);
    for (Eigen::Index m : {1, 3, 5, 7}) {
        CMatrix a = CMatrix::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const Complex v(uniform_pm1(rng2), uniform_pm1(rng2));
                a(i, j) = v;
                a(j, i) = -v;
            }
        }
        tally.observe(pfaffian(a) == Complex(0.0, 0.0) ? 0.0 : 1.0);
    }
    for (int rep = 0; rep < 20; ++rep) {
        CMatrix two = CMatrix::Zero(2, 2);
        const Complex v(uniform_pm1(rng2), uniform_pm1(rng2));
        two(0, 1) = v;
        two(1, 0) = -v;
        tally.observe(std::abs(pfaffian(two) - v));

        CMatrix four = CMatrix::Zero(4, 4);
        for (Eigen::Index i = 0; i < 4; ++i) {
            for (Eigen::Index j = i + 1; j < 4; ++j) {
                const Complex w(uniform_pm1(rng2), uniform_pm1(rng2));
                four(i, j) = w;
                four(j, i) = -w;
            }
        }
        const Complex closed =
            four(0, 1) * four(2, 3) - four(0, 2) * four(1, 3) + four(0, 3) * four(1, 2);
        tally.observe(std::abs(pfaffian(four) - closed));
    }
    return finish("pfaffian_kernel", tally, 1e-8);
}

CheckResult check_compiled_structure(size_t instances, uint64_t seed) {
    Rng rng(seed);
    // Each structural property has its own tolerance; worst is reported as
    // the largest defect/tolerance ratio.
    Tally tally;
    for (size_t c = 0; c < instances; ++c) {
        const size_t n = 2 + rng.next_u64() % 5;
        const CompiledCircuit nc = compile_circuit(random_nc_circuit(rng, n, 15), n);
        tally.observe(unitarity_defect(nc.v()) / 1e-10);

        const CompiledCircuit gen = compile_circuit_general(random_general_circuit(rng, n, 15), n);
        tally.observe(orthogonality_defect(gen.r()) / 1e-8);
        const double det = Eigen::PartialPivLU<RMatrix>(gen.r()).determinant();
        tally.observe(std::abs(det - 1.0) / 1e-8);

        // Canonical route vs direct exponential on a fresh gate block.
        const GeneralQuadraticGateSpec g = random_general_gate(rng, n);
        const Eigen::Matrix4d canonical = general_gate_rotation_block(g);
        const RMatrix direct = matrix_exponential(RMatrix(g.alpha));
        tally.observe((canonical - direct).cwiseAbs().maxCoeff() / 1e-9);
    }
    CheckResult r = finish("compiled_structure", tally, 1.0);
    r.detail = "worst defect as a fraction of its tolerance (V 1e-10, R 1e-8, routes 1e-9)";
    return r;
}

CheckResult check_adaptive_exactness(size_t max_n, size_t programs, uint64_t seed) {
    Rng rng(seed);
    const size_t cap = std::min<size_t>(max_n, 6);
    Tally tally;
    for (size_t p = 0; p < programs; ++p) {
        const size_t n = 3 + p % (cap - 2);
        const AdaptiveProgram program = random_two_stage_program(rng, n);
        const FockState x = random_state(rng, n);
        double total = 0.0;
        for (const auto& record : enumerate_records(program, x)) {
            const double exact = record.joint_probability();
            const double want = oracle_record_probability(program, x, record);
            tally.observe(std::abs(exact - want));
            tally.observe(std::abs(exact_record_probability(program, x, record) - exact));
            total += exact;
        }
        tally.observe(std::abs(total - 1.0));
    }
    return finish("adaptive_exactness", tally, 1e-9);
}

std::vector<CheckResult> run_selftest(size_t max_n, uint64_t seed, bool inject_fault) {
    std::vector<CheckResult> results;
    results.push_back(check_pfaffian_kernel(40, seed));
    results.push_back(check_amplitude_oracle(max_n, 40, seed + 1));
    results.push_back(check_weight_superselection(max_n, 40, seed + 2));
    results.push_back(check_parity_superselection(max_n, 30, seed + 3));
    results.push_back(check_marginals_nc(max_n, 40, seed + 4));
    results.push_back(check_marginals_general(max_n, 40, seed + 5));
    results.push_back(check_dual_path(max_n, 30, seed + 6));
    results.push_back(check_normalization(max_n, 20, seed + 7));
    results.push_back(check_compiled_structure(40, seed + 8));
    results.push_back(check_adaptive_exactness(max_n, 10, seed + 9));
    if (inject_fault) {
        // Harness self-test: prove mismatches are caught and reported.
        CheckResult fault;
        fault.name = "injected_fault";
        fault.pass = false;
        fault.worst = 1.0;
        fault.tolerance = 1e-9;
        fault.cases = 1;
        fault.detail = "deliberately failing control";
        results.push_back(fault);
    }
    return results;
}

double chi_square_pvalue(double chi2, int dof) {
    // Q(a, x) with a = dof/2, x = chi2/2, via series or continued fraction.
    if (chi2 < 0 || dof <= 0) throw ValidationError("invalid chi-square arguments");
    const double a = 0.5 * dof;
    const double x = 0.5 * chi2;
    if (x == 0.0) return 1.0;

    auto gamma_series_p = [&](double aa, double xx) {
        double sum = 1.0 / aa;
        double term = sum;
        for (int k = 1; k < 500; ++k) {
            term *= xx / (aa + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-xx + aa * std::log(xx) - std::lgamma(aa));
    };
    auto gamma_contfrac_q = [&](double aa, double xx) {
        const double tiny = 1e-300;
        double b = xx + 1.0 - aa;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int k = 1; k < 500; ++k) {
            const double an = -k * (k - aa);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::abs(delta - 1.0) < 1e-15) break;
        }
        return h * std::exp(-xx + aa * std::log(xx) - std::lgamma(aa));
    };

    if (x < a + 1.0) {
        return std::min(1.0, std::max(0.0, 1.0 - gamma_series_p(a, x)));
    }
    return std::min(1.0, std::max(0.0, gamma_contfrac_q(a, x)));
}

ScalingPoint scaling_point(size_t n, size_t gates, uint64_t seed) {
    using clock = std::chrono::steady_clock;
    Rng rng(seed);

    ScalingPoint point;
    point.n = n;
    point.gates = gates;

    const auto t0 = clock::now();
    const auto two_n = static_cast<Eigen::Index>(2 * n);
    RMatrix r = RMatrix::Identity(two_n, two_n);
    for (size_t g = 0; g < gates; ++g) {
        apply_gate_rotation(r, GateSpec(random_general_gate(rng, n)));
    }
    const CMatrix t = t_matrix_from_r(r);
    const auto t1 = clock::now();

    // Half-filled input, full assignment over every mode.
    std::vector<uint8_t> bits(n);
    for (size_t m = 0; m < n; ++m) bits[m] = static_cast<uint8_t>(m % 2 == 0);
    const FockState x(bits);
    std::vector<size_t> all(n);
    for (size_t m = 0; m < n; ++m) all[m] = m;

    Rng sampler_rng(seed ^ 0xabcdef);
    const SampledOutcome outcome =
        sample_subset_outcome({t}, x, {}, ModeSubset(n, all), sampler_rng);
    const auto t2 = clock::now();

    (void)outcome;
    point.matrix_dim = 2 * (x.hamming_weight() + n);
    point.compile_seconds = std::chrono::duration<double>(t1 - t0).count();
    point.sample_seconds = std::chrono::duration<double>(t2 - t1).count();
    point.total_seconds = std::chrono::duration<double>(t2 - t0).count();
    return point;
}

double log_log_slope(const std::vector<ScalingPoint>& points) {
    const size_t m = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const double lx = std::log(static_cast<double>(p.n));
        const double ly = std::log(std::max(1e-9, p.total_seconds));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = m * sxx - sx * sx;
    return (m * sxy - sx * sy) / denom;
}

}  // namespace fermisim::checks
