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

#include <vector>

#include "fermisim/gates.hpp"
#include "fermisim/linalg.hpp"

namespace fermisim {

enum class CircuitKind {
    number_conserving,  // carries V (n x n unitary) and a global phase
    general,            // carries R (2n x 2n special orthogonal)
};

/// Compiled circuit: the one-particle transfer matrix of the whole gate
/// sequence. For gates g1, g2, ... applied in that order, V = V1 V2 ... and
/// R = R1 R2 ... (conjugation maps compose left to right).
class CompiledCircuit {
  public:
    static CompiledCircuit identity_nc(size_t n);
    static CompiledCircuit identity_general(size_t n);

    size_t num_modes() const { return n_; }
    CircuitKind kind() const { return kind_; }

    const CMatrix& v() const;
    const RMatrix& r() const;
    Complex global_phase() const { return phase_; }

    /// Right-multiplies by a gate's V block on columns (i, j).
    void apply_nc_gate(const NumberConservingGateSpec& g);
    /// Right-multiplies by a gate's R block; the 4x4 rotation is computed by
    /// the canonical W/M route and cross-checked against exp(alpha).
    void apply_general_gate(const GeneralQuadraticGateSpec& g);
    void multiply_phase(Complex unit_phase);

    /// Structural invariants: V unitary / R special orthogonal, |phase| = 1.
    /// Throws NumericalError on violation.
    void check_integrity() const;

  private:
    CompiledCircuit(size_t n, CircuitKind kind);

    size_t n_ = 0;
    CircuitKind kind_ = CircuitKind::number_conserving;
    CMatrix v_;
    RMatrix r_;
    Complex phase_ = 1.0;
};

/// exp(i b) for a Hermitian 2x2 block, in closed form.
Eigen::Matrix2cd nc_gate_unitary_block(const NumberConservingGateSpec& g);

/// The 4x4 rotation exp(alpha) computed by the canonical route: bring alpha
/// to skew canonical form, rotate each (eps_j) plane, undo the basis change.
/// Cross-checked against the Pade matrix exponential; disagreement beyond
/// 1e-6 throws NumericalError (it signals a convention bug, not roundoff).
Eigen::Matrix4d general_gate_rotation_block(const GeneralQuadraticGateSpec& g);

/// True when every gate has a number-conserving form.
bool circuit_is_number_conserving(const std::vector<GateSpec>& gates);

CompiledCircuit compile_number_conserving(const std::vector<NumberConservingGateSpec>& gates, size_t n);
CompiledCircuit compile_general(const std::vector<GeneralQuadraticGateSpec>& gates, size_t n);

/// Compiles a mixed gate list, choosing the number-conserving path when
/// every gate allows it (Pauli gates contribute exp(i(a1+b1)) to the global
/// phase there) and the general path otherwise.
CompiledCircuit compile_circuit(const std::vector<GateSpec>& gates, size_t n);

/// Forces the general path regardless of gate content.
CompiledCircuit compile_circuit_general(const std::vector<GateSpec>& gates, size_t n);

/// The n x 2n matrix T with T_ij = (R^T_{2i,j} + i R^T_{2i+1,j}) / 2, so
/// that U^dag a_i U = sum_j T_ij c_j.
CMatrix t_matrix(const CompiledCircuit& circuit);
CMatrix t_matrix_from_r(const RMatrix& r);

/// Right-multiplies a cumulative 2n x 2n rotation by one gate's rotation
/// block (Pauli and number-conserving gates are fermionized first). Used to
/// extend the evolution across adaptive segments.
void apply_gate_rotation(RMatrix& r, const GateSpec& gate);

}  // namespace fermisim
