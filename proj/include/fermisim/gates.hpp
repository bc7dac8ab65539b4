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

#include <variant>
#include <vector>

#include "fermisim/linalg.hpp"

namespace fermisim {

/// Two-qubit gate exp(i H) on adjacent qubits (q, q+1) with
///   H = a1 Z(x)I + b1 I(x)Z + a2 X(x)X + b2 Y(x)Y + a3 X(x)Y + b3 Y(x)X.
/// Adjacency is required: under Jordan-Wigner, only nearest-neighbor Pauli
/// gates of this form fermionize to quadratic interactions.
struct PauliGateSpec {
    size_t qubit = 0;  // acts on (qubit, qubit + 1)
    double a1 = 0, b1 = 0;
    double a2 = 0, b2 = 0;
    double a3 = 0, b3 = 0;

    void validate(size_t n) const;
};

/// Gate exp(i H) with H = b_ii n_i + b_jj n_j + b_ij a_i^dag a_j + h.c.
/// The modes need not be adjacent.
struct NumberConservingGateSpec {
    size_t mode_i = 0;
    size_t mode_j = 1;
    double b_ii = 0, b_jj = 0;
    Complex b_ij = 0;

    void validate(size_t n) const;
    Eigen::Matrix2cd block() const;
};

/// Gate exp(i H) with H = (i/4) sum_{kl} alpha_kl c_k c_l over the four
/// Majorana operators (2i, 2i+1, 2j, 2j+1); alpha is real antisymmetric.
struct GeneralQuadraticGateSpec {
    size_t mode_i = 0;
    size_t mode_j = 1;
    Eigen::Matrix4d alpha = Eigen::Matrix4d::Zero();

    void validate(size_t n) const;
};

using GateSpec = std::variant<PauliGateSpec, NumberConservingGateSpec, GeneralQuadraticGateSpec>;

void validate_gate(const GateSpec& gate, size_t n);

/// Modes a gate acts on (two distinct indices).
std::pair<size_t, size_t> gate_modes(const GateSpec& gate);

/// Majorana-quadratic form of a gate Hamiltonian plus the identity
/// coefficient split off by that normalization:
///   H = (i/4) sum alpha_kl c_k c_l + identity_coeff * I.
struct MajoranaQuadratic {
    GeneralQuadraticGateSpec spec;
    double identity_coeff = 0;
};

/// Jordan-Wigner fermionization of a Pauli gate. Pauli operators are
/// traceless, so the identity coefficient is always 0 here; it is kept in
/// the return type so callers track phases uniformly.
MajoranaQuadratic fermionize_pauli(const PauliGateSpec& g);

/// Expresses a number-conserving gate Hamiltonian in Majorana form. The
/// generated unitary matches the original up to the global phase
/// exp(i * identity_coeff) with identity_coeff = (b_ii + b_jj)/2.
MajoranaQuadratic lift_number_conserving(const NumberConservingGateSpec& g);

/// True when the Pauli gate conserves fermion number (no pairing terms):
/// a2 == b2 and a3 == -b3.
bool pauli_is_number_conserving(const PauliGateSpec& g);

/// Number-conserving form of a balanced Pauli gate plus the dropped
/// identity coefficient a1 + b1 (tracked as a global phase).
struct NumberConservingWithPhase {
    NumberConservingGateSpec spec;
    double identity_coeff = 0;
};
NumberConservingWithPhase pauli_to_number_conserving(const PauliGateSpec& g);

/// Checks the matchgate block form: the {00,11} and {01,10} sectors must
/// decouple and the two 2x2 blocks must have equal determinant (a shared
/// global phase over SU(2) x SU(2)). Throws ValidationError when u is not
/// unitary.
bool is_matchgate_unitary(const Eigen::Matrix4cd& u, double tol = kStructureTol);

// 4x4 dense helpers shared by the oracle and the convention tests. Basis
// ordering |x_i x_j> -> index 2*x_i + x_j, occupied = 1.

/// H = a1 Z(x)I + b1 I(x)Z + a2 XX + b2 YY + a3 XY + b3 YX.
Eigen::Matrix4cd pauli_gate_hamiltonian(const PauliGateSpec& g);

/// exp(i H) via Hermitian eigendecomposition (independent of the Pade
/// exponential used by the compiler).
Eigen::Matrix4cd pauli_gate_unitary(const PauliGateSpec& g);

/// The gate Hamiltonian (i/4) sum alpha_kl c_k c_l as a dense 4x4 matrix
/// on the two-mode sector, using the local Jordan-Wigner representation
/// c_2i = X(x)I, c_2i+1 = Y(x)I, c_2j = Z(x)X, c_2j+1 = Z(x)Y.
Eigen::Matrix4cd majorana_local_hamiltonian(const Eigen::Matrix4d& alpha);

/// exp(i H) for a Hermitian h, by eigendecomposition.
Eigen::Matrix4cd hermitian_expi(const Eigen::Matrix4cd& h);

}  // namespace fermisim
