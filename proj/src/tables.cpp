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

#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

namespace {

constexpr Complex kI(0.0, 1.0);

// Vacuum contraction <c_u c_v>: H entries in closed form.
Complex h_entry(uint32_t u, uint32_t v) {
    if (u / 2 != v / 2) return 0.0;
    if (u == v) return 1.0;
    return (u < v) ? kI : -kI;
}

// X H for X an n x 2n coefficient matrix; H is block diagonal.
CMatrix right_multiply_h(const CMatrix& x) {
    CMatrix out(x.rows(), x.cols());
    for (Eigen::Index p = 0; 2 * p + 1 < x.cols(); ++p) {
        out.col(2 * p) = x.col(2 * p) - kI * x.col(2 * p + 1);
        out.col(2 * p + 1) = kI * x.col(2 * p) + x.col(2 * p + 1);
    }
    return out;
}

void append_stage_pairs(std::vector<StringOp>& ops, const OutcomeAssignment& y, uint32_t stage) {
    for (size_t k = 0; k < y.size(); ++k) {
        const auto j = static_cast<uint32_t>(y.subset().modes()[k]);
        if (y.bits()[k] == 0) {
            ops.push_back({StringOp::Kind::dressed_ann, stage, j});
            ops.push_back({StringOp::Kind::dressed_cre, stage, j});
        } else {
            ops.push_back({StringOp::Kind::dressed_cre, stage, j});
            ops.push_back({StringOp::Kind::dressed_ann, stage, j});
        }
    }
}

}  // namespace

CMatrix contraction_matrix(size_t n) {
    CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(n); ++p) {
        h(2 * p, 2 * p) = 1.0;
        h(2 * p + 1, 2 * p + 1) = 1.0;
        h(2 * p, 2 * p + 1) = kI;
        h(2 * p + 1, 2 * p) = -kI;
    }
    return h;
}

std::vector<StringOp> majorana_operator_string(const FockState& x,
                                               const std::vector<OutcomeAssignment>& stages) {
    const std::vector<size_t> occupied = x.occupied_modes();
    std::vector<StringOp> ops;

    // Bra-side input operators, modes descending.
    for (auto it = occupied.rbegin(); it != occupied.rend(); ++it) {
        ops.push_back({StringOp::Kind::bare, 0, static_cast<uint32_t>(2 * *it)});
    }
    // Earlier stages once on the bra side, the last stage once in the
    // middle, earlier stages mirrored on the ket side.
    for (size_t s = 0; s < stages.size(); ++s) {
        append_stage_pairs(ops, stages[s], static_cast<uint32_t>(s));
    }
    for (size_t s = stages.size(); s-- > 1;) {
        append_stage_pairs(ops, stages[s - 1], static_cast<uint32_t>(s - 1));
    }
    // Ket-side input operators, modes ascending.
    for (size_t p : occupied) {
        ops.push_back({StringOp::Kind::bare, 0, static_cast<uint32_t>(2 * p)});
    }
    return ops;
}

std::vector<StringOp> fermi_operator_string(const FockState& x, const OutcomeAssignment& y) {
    const std::vector<size_t> occupied = x.occupied_modes();
    std::vector<StringOp> ops;
    for (auto it = occupied.rbegin(); it != occupied.rend(); ++it) {
        ops.push_back({StringOp::Kind::bare_ann, 0, static_cast<uint32_t>(*it)});
    }
    append_stage_pairs(ops, y, 0);
    for (size_t p : occupied) {
        ops.push_back({StringOp::Kind::bare_cre, 0, static_cast<uint32_t>(p)});
    }
    return ops;
}

ContractionKernel::ContractionKernel(std::vector<CMatrix> t_chain) : t_(std::move(t_chain)) {
    if (t_.empty()) throw ValidationError("contraction kernel requires at least one T matrix");
    n_ = static_cast<size_t>(t_[0].rows());
    th_.reserve(t_.size());
    for (const auto& t : t_) {
        if (static_cast<size_t>(t.rows()) != n_ || static_cast<size_t>(t.cols()) != 2 * n_) {
            throw ValidationError("T matrices must all be n x 2n over the same n");
        }
        th_.push_back({right_multiply_h(t), right_multiply_h(t.conjugate())});
    }
}

const CMatrix& ContractionKernel::cross(bool a_conj, size_t a_stage, bool b_conj, size_t b_stage) const {
    const auto key = std::make_tuple(a_conj, a_stage, b_conj, b_stage);
    auto it = cross_.find(key);
    if (it == cross_.end()) {
        const CMatrix& xa_h = th_[a_stage][a_conj ? 1 : 0];
        const CMatrix& xb = t_[b_stage];
        CMatrix prod;
        if (b_conj) {
            prod = xa_h * xb.adjoint();
        } else {
            prod = xa_h * xb.transpose();
        }
        it = cross_.emplace(key, std::move(prod)).first;
    }
    return it->second;
}

Complex ContractionKernel::contract(const StringOp& first, const StringOp& second) const {
    using Kind = StringOp::Kind;
    if (first.kind == Kind::bare_ann || first.kind == Kind::bare_cre ||
        second.kind == Kind::bare_ann || second.kind == Kind::bare_cre) {
        throw InternalError("fermion-picture ops have no Majorana contraction");
    }
    const bool first_bare = first.kind == Kind::bare;
    const bool second_bare = second.kind == Kind::bare;
    if (first_bare && second_bare) {
        return h_entry(first.index, second.index);
    }
    if (!first_bare && second_bare) {
        const bool conj = first.kind == Kind::dressed_cre;
        return th_[first.stage][conj ? 1 : 0](first.index, second.index);
    }
    if (first_bare && !second_bare) {
        // (H X^T)_{u,j} = conj( (conj(X) H)_{j,u} )
        const bool conj = second.kind == Kind::dressed_cre;
        return std::conj(th_[second.stage][conj ? 0 : 1](second.index, first.index));
    }
    const bool a_conj = first.kind == Kind::dressed_cre;
    const bool b_conj = second.kind == Kind::dressed_cre;
    return cross(a_conj, first.stage, b_conj, second.stage)(first.index, second.index);
}

CMatrix build_table1_matrix(const CMatrix& v, const FockState& x, const OutcomeAssignment& y) {
    const auto n = static_cast<size_t>(v.rows());
    if (static_cast<size_t>(v.cols()) != n || x.num_modes() != n || y.subset().n() != n) {
        throw ValidationError("table I shape mismatch");
    }
    const std::vector<StringOp> ops = fermi_operator_string(x, y);
    const auto m = static_cast<Eigen::Index>(ops.size());

    using Kind = StringOp::Kind;
    // Contraction of an annihilation-type op with a creation-type op; every
    // other ordered pair contracts to zero. Cells the operator ordering
    // makes impossible ('X' in the table) are guarded below.
    auto entry = [&](const StringOp& a, const StringOp& b) -> Complex {
        if (b.kind == Kind::bare_ann && a.kind != Kind::bare_ann) {
            throw InternalError("table I: input annihilator found after other operators");
        }
        if (a.kind == Kind::bare_cre && b.kind != Kind::bare_cre) {
            throw InternalError("table I: input creator found before other operators");
        }
        const bool a_ann = a.kind == Kind::bare_ann || a.kind == Kind::dressed_ann;
        const bool b_cre = b.kind == Kind::bare_cre || b.kind == Kind::dressed_cre;
        if (!a_ann || !b_cre) return 0.0;
        const bool a_bare = a.kind == Kind::bare_ann;
        const bool b_bare = b.kind == Kind::bare_cre;
        if (a_bare && b_bare) return (a.index == b.index) ? 1.0 : 0.0;
        if (a_bare && !b_bare) return std::conj(v(a.index, b.index));  // V^dag_{j, p}
        if (!a_bare && b_bare) return v(b.index, a.index);             // V_{p, j}
        return (a.index == b.index) ? 1.0 : 0.0;                       // unitarity
    };

    CMatrix mmat = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const Complex val = entry(ops[static_cast<size_t>(i)], ops[static_cast<size_t>(j)]);
            mmat(i, j) = val;
            mmat(j, i) = -val;
        }
    }
    return mmat;
}

CMatrix build_table2_matrix(const CMatrix& t, const FockState& x, const OutcomeAssignment& y) {
    return build_table3_matrix({t}, x, {y});
}

CMatrix build_table3_matrix(const std::vector<CMatrix>& t_chain, const FockState& x,
                            const std::vector<OutcomeAssignment>& stages) {
    if (t_chain.size() != stages.size()) {
        throw ValidationError("T chain and outcome chain lengths differ");
    }
    ContractionKernel kernel(t_chain);
    if (kernel.n() != x.num_modes()) throw ValidationError("mode count mismatch");
    for (const auto& y : stages) {
        if (y.subset().n() != x.num_modes()) throw ValidationError("mode count mismatch");
    }
    const std::vector<StringOp> ops = majorana_operator_string(x, stages);
    const auto m = static_cast<Eigen::Index>(ops.size());
    CMatrix mat = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const Complex val = kernel.contract(ops[static_cast<size_t>(i)], ops[static_cast<size_t>(j)]);
            mat(i, j) = val;
            mat(j, i) = -val;
        }
    }
    return mat;
}

double probability_from_pfaffian(Complex pf) {
    const double im = std::abs(pf.imag());
    if (im > 1e-6) {
        std::ostringstream msg;
        msg << "probability has imaginary residue " << im;
        throw NumericalError(msg.str());
    }
    double p = pf.real();
    if (p < -1e-6 || p > 1.0 + 1e-6) {
        std::ostringstream msg;
        msg << "probability " << p << " outside [0, 1]";
        throw NumericalError(msg.str());
    }
    if (p < 0.0 && p >= -1e-9) p = 0.0;
    if (p > 1.0 && p <= 1.0 + 1e-9) p = 1.0;
    return p;
}

double marginal_probability_nc(const CompiledCircuit& circuit, const FockState& x,
                               const OutcomeAssignment& y) {
    if (circuit.num_modes() != x.num_modes()) throw ValidationError("mode count mismatch");
    const CMatrix m = build_table1_matrix(circuit.v(), x, y);
    return probability_from_pfaffian(pfaffian(m));
}

double marginal_probability_general(const CompiledCircuit& circuit, const FockState& x,
                                    const OutcomeAssignment& y) {
    if (circuit.num_modes() != x.num_modes()) throw ValidationError("mode count mismatch");
    const CMatrix n = build_table2_matrix(t_matrix(circuit), x, y);
    return probability_from_pfaffian(pfaffian(n));
}

double joint_probability(const std::vector<CMatrix>& t_chain, const FockState& x,
                         const std::vector<OutcomeAssignment>& stages) {
    const CMatrix o = build_table3_matrix(t_chain, x, stages);
    return probability_from_pfaffian(pfaffian(o));
}

}  // namespace fermisim
