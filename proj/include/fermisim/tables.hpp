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
#include <tuple>
#include <vector>

#include "fermisim/circuit.hpp"
#include "fermisim/fock.hpp"
#include "fermisim/linalg.hpp"

namespace fermisim {

/// The 2n x 2n Hermitian matrix of vacuum contractions of Majorana pairs:
/// 2x2 blocks [[1, i], [-i, 1]] on the diagonal.
CMatrix contraction_matrix(size_t n);

/// One operator in the measurement expectation string. The string layout
/// (shared by every table builder, so the tables cannot drift apart) is:
///
///   [input annihilators, modes descending]
///   [stage 1 pairs] ... [stage k-1 pairs]       (earlier stages, bra side)
///   [stage k pairs]                             (last stage, once)
///   [stage k-1 pairs] ... [stage 1 pairs]       (earlier stages, ket side)
///   [input creators, modes ascending]
///
/// within a stage: measured modes ascending; outcome 0 puts the conjugated
/// annihilator first (a_j a_j^dag), outcome 1 the creator (a_j^dag a_j).
struct StringOp {
    enum class Kind : uint8_t {
        bare,          // c_{2p} from the input state (Majorana picture)
        dressed_ann,   // U^dag a_j U   -> rows of T    (or of V)
        dressed_cre,   // U^dag a_j^dag U -> rows of conj(T) (or V^dag)
        bare_ann,      // a_p from the input state (fermion picture, bra)
        bare_cre,      // a_p^dag from the input state (ket)
    };
    Kind kind;
    uint32_t stage;  // index into the T chain; unused for bare ops
    uint32_t index;  // Majorana index 2p for bare; measured mode j for dressed; mode p for bare_ann/cre
};

/// Majorana-picture string for Tables II/III.
std::vector<StringOp> majorana_operator_string(const FockState& x,
                                               const std::vector<OutcomeAssignment>& stages);

/// Fermion-picture string for Table I (single stage).
std::vector<StringOp> fermi_operator_string(const FockState& x, const OutcomeAssignment& y);

/// Vacuum contraction values between dressed/bare Majorana operators for a
/// chain of T matrices. Products such as T^a H (T^b)^T are computed lazily
/// and cached. Not thread-safe; use one kernel per computation.
class ContractionKernel {
  public:
    explicit ContractionKernel(std::vector<CMatrix> t_chain);

    size_t n() const { return n_; }
    size_t num_stages() const { return t_.size(); }

    /// Contraction of two string operators, 'first' earlier than 'second'.
    Complex contract(const StringOp& first, const StringOp& second) const;

  private:
    const CMatrix& cross(bool a_conj, size_t a_stage, bool b_conj, size_t b_stage) const;

    size_t n_ = 0;
    std::vector<CMatrix> t_;                  // T^s, n x 2n
    std::vector<std::array<CMatrix, 2>> th_;  // [s][conj] = X H, n x 2n
    mutable std::map<std::tuple<bool, size_t, bool, size_t>, CMatrix> cross_;
};

/// Table I: antisymmetric matrix M with p(y*|x) = Pf(M) for a
/// number-conserving circuit with transfer matrix V.
CMatrix build_table1_matrix(const CMatrix& v, const FockState& x, const OutcomeAssignment& y);

/// Table II: antisymmetric matrix N with p(y*|x) = Pf(N) for a general
/// circuit with matrix T.
CMatrix build_table2_matrix(const CMatrix& t, const FockState& x, const OutcomeAssignment& y);

/// Table III (and its k-stage generalization): antisymmetric matrix O with
/// p(y_1*, ..., y_k* | x) = Pf(O). t_chain[s] belongs to the cumulative
/// evolution through stage s; earlier-stage projectors appear twice.
CMatrix build_table3_matrix(const std::vector<CMatrix>& t_chain, const FockState& x,
                            const std::vector<OutcomeAssignment>& stages);

/// Converts a Pfaffian to a probability, enforcing numerical integrity:
/// imaginary residue or range excess beyond 1e-6 aborts; residues within
/// 1e-9 of the boundary are cleaned.
double probability_from_pfaffian(Complex pf);

double marginal_probability_nc(const CompiledCircuit& circuit, const FockState& x,
                               const OutcomeAssignment& y);
double marginal_probability_general(const CompiledCircuit& circuit, const FockState& x,
                                    const OutcomeAssignment& y);

/// Joint probability of a staged outcome record via Pf of the Table III
/// matrix. The last stage may be a partial assignment (sampling prefix).
double joint_probability(const std::vector<CMatrix>& t_chain, const FockState& x,
                         const std::vector<OutcomeAssignment>& stages);

}  // namespace fermisim
