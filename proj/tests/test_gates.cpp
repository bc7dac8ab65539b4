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

#include "fermisim/gates.hpp"

#include <random>

#include "doctest.h"
#include "fermisim/errors.hpp"
#include "test_util.hpp"

using namespace fermisim;

namespace {

constexpr Complex kI(0.0, 1.0);

// Dense 4x4 Hamiltonian of a number-conserving gate on an adjacent pair,
// basis |x_i x_j> -> 2 x_i + x_j. Written out by hand, independent of the
// Majorana expansion under test.
Eigen::Matrix4cd nc_dense_hamiltonian(const NumberConservingGateSpec& g) {
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h(1, 1) = g.b_jj;
    h(2, 2) = g.b_ii;
    h(3, 3) = g.b_ii + g.b_jj;
    h(2, 1) = g.b_ij;
    h(1, 2) = std::conj(g.b_ij);
    return h;
}

PauliGateSpec random_pauli(std::mt19937_64& rng) {
    PauliGateSpec g;
    g.qubit = 0;
    g.a1 = test::uniform(rng);
    g.b1 = test::uniform(rng);
    g.a2 = test::uniform(rng);
    g.b2 = test::uniform(rng);
    g.a3 = test::uniform(rng);
    g.b3 = test::uniform(rng);
    return g;
}

}  // namespace

TEST_CASE("fermionize_pauli: zero gate") {
    PauliGateSpec g;
    const MajoranaQuadratic m = fermionize_pauli(g);
    CHECK(m.spec.alpha.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.identity_coeff == 0.0);
}

TEST_CASE("fermionize_pauli: Z rotation recovers number-operator structure") {
    PauliGateSpec g;
    g.a1 = 0.77;
    const MajoranaQuadratic m = fermionize_pauli(g);
    // a1 Z(x)I = -2 a1 n_i + a1 I: a single (2i, 2i+1) Majorana block.
    CHECK(m.spec.alpha(0, 1) == doctest::Approx(-2.0 * 0.77).epsilon(1e-14));
    CHECK(m.spec.alpha.block<2, 2>(2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.spec.alpha.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
    // The Majorana normalization is traceless, so the identity coefficient
    // vanishes; the dense comparison below pins the overall convention.
    CHECK(m.identity_coeff == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("fermionize_pauli reproduces the qubit unitary (dense 4x4 oracle)") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 20; ++rep) {
        const PauliGateSpec g = random_pauli(rng);
        const MajoranaQuadratic m = fermionize_pauli(g);
        const Eigen::Matrix4cd lhs = pauli_gate_unitary(g);
        const Eigen::Matrix4cd rhs =
            std::exp(kI * m.identity_coeff) * hermitian_expi(majorana_local_hamiltonian(m.spec.alpha));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("fermionize_pauli: XX+YY quarter turn swaps occupation") {
    PauliGateSpec g;
    g.a2 = g.b2 = M_PI / 4;
    const MajoranaQuadratic m = fermionize_pauli(g);
    const Eigen::Matrix4cd u = hermitian_expi(majorana_local_hamiltonian(m.spec.alpha));
    // |01> -> i |10> with unit probability.
    CHECK(std::abs(std::abs(u(2, 1)) - 1.0) < 1e-12);
    CHECK(std::abs(u(2, 1) - kI) < 1e-12);
    CHECK(std::abs(u(1, 1)) < 1e-12);
}

TEST_CASE("lift_number_conserving: structure of the alpha block") {
    NumberConservingGateSpec zero;
    CHECK(lift_number_conserving(zero).spec.alpha.cwiseAbs().maxCoeff() == 0.0);

    NumberConservingGateSpec numeric;
    numeric.b_ii = 0.9;  // b = diag(theta, 0)
    const MajoranaQuadratic mn = lift_number_conserving(numeric);
    CHECK(mn.spec.alpha(0, 1) == doctest::Approx(0.9));
    CHECK(mn.spec.alpha.block<2, 2>(2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(mn.spec.alpha.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(mn.identity_coeff == doctest::Approx(0.45));

    NumberConservingGateSpec hop;
    hop.b_ij = 0.6;  // real hopping couples (2i, 2j+1) and (2i+1, 2j)
    const MajoranaQuadratic mh = lift_number_conserving(hop);
    CHECK(mh.spec.alpha(0, 3) == doctest::Approx(0.6));
    CHECK(mh.spec.alpha(1, 2) == doctest::Approx(-0.6));
    CHECK(mh.spec.alpha(0, 1) == doctest::Approx(0.0));
    CHECK(mh.spec.alpha(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("lift_number_conserving reproduces the gate unitary up to the tracked phase") {
    std::mt19937_64 rng(67);
    for (int rep = 0; rep < 20; ++rep) {
        NumberConservingGateSpec g;
        g.b_ii = test::uniform(rng);
        g.b_jj = test::uniform(rng);
        g.b_ij = Complex(test::uniform(rng), test::uniform(rng));
        const MajoranaQuadratic m = lift_number_conserving(g);
        const Eigen::Matrix4cd lhs = hermitian_expi(nc_dense_hamiltonian(g));
        const Eigen::Matrix4cd rhs =
            std::exp(kI * m.identity_coeff) * hermitian_expi(majorana_local_hamiltonian(m.spec.alpha));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pauli_to_number_conserving tracks the dropped identity") {
    std::mt19937_64 rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        PauliGateSpec g = random_pauli(rng);
        g.b2 = g.a2;
        g.b3 = -g.a3;
        REQUIRE(pauli_is_number_conserving(g));
        const NumberConservingWithPhase ncp = pauli_to_number_conserving(g);
        const Eigen::Matrix4cd lhs = pauli_gate_unitary(g);
        const Eigen::Matrix4cd rhs =
            std::exp(kI * ncp.identity_coeff) * hermitian_expi(nc_dense_hamiltonian(ncp.spec));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
    PauliGateSpec pairing;
    pairing.a3 = 0.4;
    CHECK(!pauli_is_number_conserving(pairing));
    CHECK_THROWS_AS(pauli_to_number_conserving(pairing), ValidationError);
}

TEST_CASE("matchgate unitary validation") {
    CHECK(is_matchgate_unitary(Eigen::Matrix4cd::Identity()));

    Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
    cnot(0, 0) = 1;
    cnot(1, 1) = 1;
    cnot(2, 3) = 1;
    cnot(3, 2) = 1;
    CHECK(!is_matchgate_unitary(cnot));

    // exp(i (pi/4)(XX + YY)) is a matchgate.
    PauliGateSpec g;
    g.a2 = g.b2 = M_PI / 4;
    CHECK(is_matchgate_unitary(pauli_gate_unitary(g)));

    // Every gate in the allowed family passes.
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 10; ++rep) {
        CHECK(is_matchgate_unitary(pauli_gate_unitary(random_pauli(rng))));
    }

    CHECK_THROWS_AS(is_matchgate_unitary(2.0 * Eigen::Matrix4cd::Identity()), ValidationError);
}

TEST_CASE("gate validation catches bad inputs") {
    PauliGateSpec p;
    p.qubit = 3;
    CHECK_THROWS_AS(p.validate(4), ValidationError);  // needs qubit+1 < n
    p.qubit = 0;
    p.a1 = std::nan("");
    CHECK_THROWS_AS(p.validate(4), ValidationError);

    NumberConservingGateSpec nc;
    nc.mode_i = nc.mode_j = 1;
    CHECK_THROWS_AS(nc.validate(4), ValidationError);

    GeneralQuadraticGateSpec gq;
    gq.alpha(0, 1) = 1.0;  // not antisymmetric
    CHECK_THROWS_AS(gq.validate(4), ValidationError);
}
