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

#include "fermisim/tables.hpp"

#include <random>

#include "doctest.h"
#include "fermisim/errors.hpp"
#include "fermisim/oracle.hpp"
#include "test_util.hpp"

using namespace fermisim;

namespace {

NumberConservingGateSpec hopping(size_t i, size_t j, double theta) {
    NumberConservingGateSpec g;
    g.mode_i = i;
    g.mode_j = j;
    g.b_ij = theta;
    return g;
}

std::vector<GateSpec> random_mixed_gates(std::mt19937_64& rng, size_t n, size_t count,
                                         bool allow_pairing) {
    std::vector<GateSpec> gates;
    for (size_t g = 0; g < count; ++g) {
        const size_t i = rng() % n;
        size_t j = rng() % n;
        while (j == i) j = rng() % n;
        if (allow_pairing && rng() % 2 == 0) {
            GeneralQuadraticGateSpec gq;
            gq.mode_i = i;
            gq.mode_j = j;
            Eigen::Matrix4d a;
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) a(r, c) = test::uniform(rng);
            }
            gq.alpha = 0.5 * (a - a.transpose());
            gates.emplace_back(gq);
        } else {
            NumberConservingGateSpec nc;
            nc.mode_i = i;
            nc.mode_j = j;
            nc.b_ii = test::uniform(rng);
            nc.b_jj = test::uniform(rng);
            nc.b_ij = Complex(test::uniform(rng), test::uniform(rng));
            gates.emplace_back(nc);
        }
    }
    return gates;
}

OutcomeAssignment random_assignment(std::mt19937_64& rng, size_t n, size_t k,
                                    const std::vector<size_t>& exclude = {}) {
    std::vector<size_t> pool;
    for (size_t m = 0; m < n; ++m) {
        if (std::find(exclude.begin(), exclude.end(), m) == exclude.end()) pool.push_back(m);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<size_t> modes(pool.begin(), pool.begin() + static_cast<long>(k));
    std::sort(modes.begin(), modes.end());
    std::vector<uint8_t> bits(k);
    for (auto& b : bits) b = static_cast<uint8_t>(rng() & 1u);
    return OutcomeAssignment(ModeSubset(n, modes), bits);
}

// Joint probability by projection: Tr P2 U2 P1 U1 |x><x| U1^dag P1 U2^dag.
// Projections leave the state unnormalized, so the final mass is the joint.
double oracle_joint(const std::vector<std::vector<GateSpec>>& segments, const FockState& x,
                    const std::vector<OutcomeAssignment>& ys) {
    StateVector s = StateVector::basis(x);
    double mass = 1.0;
    for (size_t stage = 0; stage < segments.size(); ++stage) {
        for (const auto& g : segments[stage]) s.apply_gate(g);
        mass = s.project(ys[stage]);
        if (mass < 1e-300) return 0.0;
    }
    return mass;
}

}  // namespace

TEST_CASE("contraction matrix structure") {
    const CMatrix h1 = contraction_matrix(1);
    CHECK(h1(0, 0) == Complex(1, 0));
    CHECK(h1(0, 1) == Complex(0, 1));
    CHECK(h1(1, 0) == Complex(0, -1));
    CHECK(h1(1, 1) == Complex(1, 0));

    const CMatrix h3 = contraction_matrix(3);
    CHECK(hermiticity_defect(h3) == 0.0);
    // Each block is twice a rank-1 projector: H^2 = 2H.
    CHECK(((h3 * h3) - 2.0 * h3).cwiseAbs().maxCoeff() < 1e-15);
    // Off-block entries vanish.
    CHECK(std::abs(h3(0, 2)) == 0.0);
}

TEST_CASE("table I trivial cases") {
    const CMatrix v1 = CMatrix::Identity(1, 1);
    const FockState vac = FockState::vacuum(1);
    const OutcomeAssignment zero(ModeSubset(1, {0}), {0});
    CHECK(std::abs(pfaffian(build_table1_matrix(v1, vac, zero)) - 1.0) < 1e-14);
    const OutcomeAssignment one(ModeSubset(1, {0}), {1});
    CHECK(std::abs(pfaffian(build_table1_matrix(v1, vac, one))) < 1e-14);

    const FockState occ = FockState::from_string("1");
    CHECK(std::abs(pfaffian(build_table1_matrix(v1, occ, one)) - 1.0) < 1e-14);
    CHECK(std::abs(pfaffian(build_table1_matrix(v1, occ, zero))) < 1e-14);

    const CMatrix v2 = CMatrix::Identity(2, 2);
    const FockState x10 = FockState::from_string("10");
    const OutcomeAssignment both(ModeSubset(2, {0, 1}), {1, 0});
    CHECK(std::abs(pfaffian(build_table1_matrix(v2, x10, both)) - 1.0) < 1e-14);
}

TEST_CASE("number-conserving marginals: analytic cases") {
    const double theta = 0.67;
    const CompiledCircuit c = compile_circuit({hopping(0, 1, theta)}, 2);
    const FockState x10 = FockState::from_string("10");

    CHECK(marginal_probability_nc(c, x10, OutcomeAssignment::empty(2)) == doctest::Approx(1.0));
    const double p1 = marginal_probability_nc(c, x10, OutcomeAssignment(ModeSubset(2, {1}), {1}));
    CHECK(p1 == doctest::Approx(std::sin(theta) * std::sin(theta)).epsilon(1e-12));
    const double p0 = marginal_probability_nc(c, x10, OutcomeAssignment(ModeSubset(2, {0}), {1}));
    CHECK(p0 == doctest::Approx(std::cos(theta) * std::cos(theta)).epsilon(1e-12));

    const CompiledCircuit id = compile_circuit({}, 2);
    CHECK(marginal_probability_nc(id, x10, OutcomeAssignment(ModeSubset(2, {0, 1}), {1, 0})) ==
          doctest::Approx(1.0));
}

TEST_CASE("table I marginals match the oracle on random circuits") {
    std::mt19937_64 rng(307);
    for (int rep = 0; rep < 10; ++rep) {
        const size_t n = 3 + rng() % 3;
        const auto gates = random_mixed_gates(rng, n, 12, /*allow_pairing=*/false);
        const CompiledCircuit c = compile_circuit(gates, n);
        REQUIRE(c.kind() == CircuitKind::number_conserving);
        const FockState x = FockState::from_index(rng() % (uint64_t{1} << n), n);
        for (int s = 0; s < 4; ++s) {
            const auto y = random_assignment(rng, n, 1 + rng() % n);
            const double got = marginal_probability_nc(c, x, y);
            const double want = oracle_marginal(gates, x, y);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("pairing gate from vacuum: the hand-computed Table II case") {
    PauliGateSpec g;
    g.qubit = 0;
    g.a3 = M_PI / 4;
    const CompiledCircuit c = compile_circuit({g}, 2);
    REQUIRE(c.kind() == CircuitKind::general);
    const FockState vac = FockState::vacuum(2);

    CHECK(marginal_probability_general(c, vac, OutcomeAssignment(ModeSubset(2, {0}), {0})) ==
          doctest::Approx(0.5).epsilon(1e-12));
    const double p00 =
        marginal_probability_general(c, vac, OutcomeAssignment(ModeSubset(2, {0, 1}), {0, 0}));
    const double p11 =
        marginal_probability_general(c, vac, OutcomeAssignment(ModeSubset(2, {0, 1}), {1, 1}));
    const double p01 =
        marginal_probability_general(c, vac, OutcomeAssignment(ModeSubset(2, {0, 1}), {0, 1}));
    const double p10 =
        marginal_probability_general(c, vac, OutcomeAssignment(ModeSubset(2, {0, 1}), {1, 0}));
    CHECK(p00 + p11 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p01 == doctest::Approx(0.0));
    CHECK(p10 == doctest::Approx(0.0));
}

TEST_CASE("table II marginals match the oracle on random general circuits") {
    std::mt19937_64 rng(311);
    for (int rep = 0; rep < 10; ++rep) {
        const size_t n = 2 + rng() % 3;
        const auto gates = random_mixed_gates(rng, n, 10, /*allow_pairing=*/true);
        const CompiledCircuit c = compile_circuit_general(gates, n);
        const FockState x = FockState::from_index(rng() % (uint64_t{1} << n), n);
        for (int s = 0; s < 4; ++s) {
            const auto y = random_assignment(rng, n, 1 + rng() % n);
            const double got = marginal_probability_general(c, x, y);
            const double want = oracle_marginal(gates, x, y);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("dual path: number-conserving circuits through Table I and Table II agree") {
    std::mt19937_64 rng(313);
    for (int rep = 0; rep < 8; ++rep) {
        const size_t n = 3 + rng() % 3;
        const auto gates = random_mixed_gates(rng, n, 10, /*allow_pairing=*/false);
        const CompiledCircuit nc = compile_circuit(gates, n);
        const CompiledCircuit gen = compile_circuit_general(gates, n);
        const FockState x = FockState::from_index(rng() % (uint64_t{1} << n), n);
        for (int s = 0; s < 3; ++s) {
            const auto y = random_assignment(rng, n, 1 + rng() % n);
            CHECK(marginal_probability_nc(nc, x, y) ==
                  doctest::Approx(marginal_probability_general(gen, x, y)).epsilon(1e-9));
        }
    }
}

TEST_CASE("normalization and marginal consistency") {
    std::mt19937_64 rng(317);
    const size_t n = 4;
    const auto gates = random_mixed_gates(rng, n, 10, /*allow_pairing=*/true);
    const CompiledCircuit c = compile_circuit_general(gates, n);
    const FockState x = FockState::from_string("1010");

    // Sum over all outcomes of a fixed subset.
    const std::vector<size_t> modes = {0, 2, 3};
    double total = 0.0;
    for (uint64_t w = 0; w < 8; ++w) {
        std::vector<uint8_t> bits = {static_cast<uint8_t>((w >> 2) & 1),
                                     static_cast<uint8_t>((w >> 1) & 1),
                                     static_cast<uint8_t>(w & 1)};
        total += marginal_probability_general(c, x, OutcomeAssignment(ModeSubset(n, modes), bits));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // p(y* on S) = sum_b p(y* extended by bit b on an extra mode).
    const OutcomeAssignment base(ModeSubset(n, {0, 2}), {1, 0});
    const double lhs = marginal_probability_general(c, x, base);
    double rhs = 0.0;
    for (uint8_t b : {0, 1}) {
        rhs += marginal_probability_general(c, x, OutcomeAssignment(ModeSubset(n, {0, 1, 2}), {1, b, 0}));
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("parity superselection for general circuits") {
    std::mt19937_64 rng(331);
    const size_t n = 4;
    const auto gates = random_mixed_gates(rng, n, 12, /*allow_pairing=*/true);
    const CompiledCircuit c = compile_circuit_general(gates, n);
    const FockState x = FockState::from_string("1100");
    double wrong_parity_mass = 0.0;
    for (uint64_t idx = 0; idx < (uint64_t{1} << n); ++idx) {
        const FockState y = FockState::from_index(idx, n);
        std::vector<size_t> all_modes(n);
        for (size_t m = 0; m < n; ++m) all_modes[m] = m;
        std::vector<uint8_t> bits(n);
        for (size_t m = 0; m < n; ++m) bits[m] = y.occupied(m) ? 1 : 0;
        const double p =
            marginal_probability_general(c, x, OutcomeAssignment(ModeSubset(n, all_modes), bits));
        if (parity(y) != parity(x)) wrong_parity_mass += p;
    }
    CHECK(wrong_parity_mass < 1e-10);
}

TEST_CASE("table III: one stage reduces exactly to table II") {
    std::mt19937_64 rng(337);
    const size_t n = 3;
    const auto gates = random_mixed_gates(rng, n, 8, /*allow_pairing=*/true);
    const CompiledCircuit c = compile_circuit_general(gates, n);
    const CMatrix t = t_matrix(c);
    const FockState x = FockState::from_string("110");
    const auto y = random_assignment(rng, n, 2);
    const CMatrix two = build_table2_matrix(t, x, y);
    const CMatrix three = build_table3_matrix({t}, x, {y});
    CHECK((two - three).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("table III: trivial second stage merges into one") {
    std::mt19937_64 rng(347);
    const size_t n = 4;
    const auto gates = random_mixed_gates(rng, n, 8, /*allow_pairing=*/true);
    const CompiledCircuit c = compile_circuit_general(gates, n);
    const CMatrix t = t_matrix(c);
    const FockState x = FockState::from_string("1001");

    const OutcomeAssignment y1(ModeSubset(n, {0, 2}), {1, 0});
    const OutcomeAssignment y2(ModeSubset(n, {1, 3}), {0, 1});
    // Stage 2 evolves by the identity, so T^12 = T^1.
    const double joint = joint_probability({t, t}, x, {y1, y2});
    const OutcomeAssignment merged(ModeSubset(n, {0, 1, 2, 3}), {1, 0, 0, 1});
    const double merged_p = marginal_probability_general(c, x, merged);
    CHECK(joint == doctest::Approx(merged_p).epsilon(1e-9));
}

TEST_CASE("table III joints match the collapse oracle on random two-stage circuits") {
    std::mt19937_64 rng(349);
    for (int rep = 0; rep < 8; ++rep) {
        const size_t n = 4;
        const auto seg1 = random_mixed_gates(rng, n, 6, /*allow_pairing=*/true);
        const auto seg2 = random_mixed_gates(rng, n, 6, /*allow_pairing=*/true);

        const auto two_n = static_cast<Eigen::Index>(2 * n);
        RMatrix r = RMatrix::Identity(two_n, two_n);
        for (const auto& g : seg1) apply_gate_rotation(r, g);
        const CMatrix t1 = t_matrix_from_r(r);
        for (const auto& g : seg2) apply_gate_rotation(r, g);
        const CMatrix t12 = t_matrix_from_r(r);

        const FockState x = FockState::from_index(rng() % 16, n);
        const auto y1 = random_assignment(rng, n, 1 + rng() % 2);
        const auto y2 = random_assignment(rng, n, 1 + rng() % 2, y1.subset().modes());

        const double got = joint_probability({t1, t12}, x, {y1, y2});
        const double want = oracle_joint({seg1, seg2}, x, {y1, y2});
        CHECK(got == doctest::Approx(want).epsilon(1e-9));

        // Monotone chain: extending a record cannot raise its probability.
        const double prefix = joint_probability({t1}, x, {y1});
        CHECK(got <= prefix + 1e-9);
    }
}

TEST_CASE("probability_from_pfaffian integrity rules") {
    CHECK(probability_from_pfaffian(Complex(0.25, 1e-12)) == doctest::Approx(0.25));
    CHECK(probability_from_pfaffian(Complex(-1e-10, 0)) == 0.0);
    CHECK(probability_from_pfaffian(Complex(1.0 + 1e-10, 0)) == 1.0);
    CHECK_THROWS_AS(probability_from_pfaffian(Complex(0.5, 1e-3)), NumericalError);
    CHECK_THROWS_AS(probability_from_pfaffian(Complex(1.5, 0)), NumericalError);
    CHECK_THROWS_AS(probability_from_pfaffian(Complex(-0.2, 0)), NumericalError);
}

TEST_CASE("a non-unitary V is caught by the integrity checks") {
    const CMatrix v = 2.0 * CMatrix::Identity(2, 2);
    const FockState x = FockState::from_string("10");
    const OutcomeAssignment y(ModeSubset(2, {0, 1}), {1, 0});
    const Complex pf = pfaffian(build_table1_matrix(v, x, y));
    CHECK_THROWS_AS(probability_from_pfaffian(pf), NumericalError);
}

TEST_CASE("shape validation") {
    const CMatrix v = CMatrix::Identity(3, 3);
    CHECK_THROWS_AS(build_table1_matrix(v, FockState::from_string("10"),
                                        OutcomeAssignment::empty(2)),
                    ValidationError);
    CHECK_THROWS_AS(build_table3_matrix({}, FockState::from_string("10"), {}), ValidationError);
    const CompiledCircuit c = compile_circuit({}, 2);
    CHECK_THROWS_AS(marginal_probability_nc(c, FockState::from_string("100"),
                                            OutcomeAssignment::empty(3)),
                    ValidationError);
}
