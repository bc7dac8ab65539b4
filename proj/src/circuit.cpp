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

#include "fermisim/circuit.hpp"

#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

namespace {

constexpr Complex kI(0.0, 1.0);

Eigen::Matrix2d plane_rotation(double eps) {
    // exp([[0, eps], [-eps, 0]])
    Eigen::Matrix2d m;
    m << std::cos(eps), std::sin(eps), -std::sin(eps), std::cos(eps);
    return m;
}

}  // namespace

CompiledCircuit::CompiledCircuit(size_t n, CircuitKind kind) : n_(n), kind_(kind) {
    if (kind_ == CircuitKind::number_conserving) {
        v_ = CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    } else {
        r_ = RMatrix::Identity(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    }
}

CompiledCircuit CompiledCircuit::identity_nc(size_t n) {
    return CompiledCircuit(n, CircuitKind::number_conserving);
}

CompiledCircuit CompiledCircuit::identity_general(size_t n) {
    return CompiledCircuit(n, CircuitKind::general);
}

const CMatrix& CompiledCircuit::v() const {
    if (kind_ != CircuitKind::number_conserving) {
        throw ValidationError("circuit was compiled on the general path; V is not available");
    }
    return v_;
}

const RMatrix& CompiledCircuit::r() const {
    if (kind_ != CircuitKind::general) {
        throw ValidationError("circuit was compiled on the number-conserving path; R is not available");
    }
    return r_;
}

void CompiledCircuit::apply_nc_gate(const NumberConservingGateSpec& g) {
    if (kind_ != CircuitKind::number_conserving) throw ValidationError("wrong circuit kind for gate");
    g.validate(n_);
    const Eigen::Matrix2cd u = nc_gate_unitary_block(g);
    const auto i = static_cast<Eigen::Index>(g.mode_i);
    const auto j = static_cast<Eigen::Index>(g.mode_j);
    // Right multiplication by the embedded gate touches only columns i, j.
    const CVector ci = v_.col(i);
    const CVector cj = v_.col(j);
    v_.col(i) = ci * u(0, 0) + cj * u(1, 0);
    v_.col(j) = ci * u(0, 1) + cj * u(1, 1);
}

namespace {

// (R * embed(rot)) touches only the four block columns.
void right_multiply_rotation_block(RMatrix& r, const Eigen::Matrix4d& rot, size_t mode_i, size_t mode_j) {
    const std::array<Eigen::Index, 4> idx = {
        static_cast<Eigen::Index>(2 * mode_i), static_cast<Eigen::Index>(2 * mode_i + 1),
        static_cast<Eigen::Index>(2 * mode_j), static_cast<Eigen::Index>(2 * mode_j + 1)};
    Eigen::Matrix<double, Eigen::Dynamic, 4> cols(r.rows(), 4);
    for (int c = 0; c < 4; ++c) cols.col(c) = r.col(idx[static_cast<size_t>(c)]);
    Eigen::Matrix<double, Eigen::Dynamic, 4> updated = cols * rot;
    for (int c = 0; c < 4; ++c) r.col(idx[static_cast<size_t>(c)]) = updated.col(c);
}

}  // namespace

void CompiledCircuit::apply_general_gate(const GeneralQuadraticGateSpec& g) {
    if (kind_ != CircuitKind::general) throw ValidationError("wrong circuit kind for gate");
    g.validate(n_);
    right_multiply_rotation_block(r_, general_gate_rotation_block(g), g.mode_i, g.mode_j);
}

void CompiledCircuit::multiply_phase(Complex unit_phase) {
    phase_ *= unit_phase;
}

void CompiledCircuit::check_integrity() const {
    if (std::abs(std::abs(phase_) - 1.0) > 1e-12) {
        throw NumericalError("global phase drifted off the unit circle");
    }
    if (kind_ == CircuitKind::number_conserving) {
        if (!all_finite(v_)) throw NumericalError("compiled V has non-finite entries");
        const double d = unitarity_defect(v_);
        if (d > kStructureTol) {
            std::ostringstream msg;
            msg << "compiled V is not unitary (defect " << d << ")";
            throw NumericalError(msg.str());
        }
    } else {
        if (!all_finite(r_)) throw NumericalError("compiled R has non-finite entries");
        const double d = orthogonality_defect(r_);
        if (d > 1e-8) {
            std::ostringstream msg;
            msg << "compiled R is not orthogonal (defect " << d << ")";
            throw NumericalError(msg.str());
        }
        // det(R) = +1 for exponentials of antisymmetric generators.
        const double det = Eigen::PartialPivLU<RMatrix>(r_).determinant();
        if (std::abs(det - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "compiled R has determinant " << det << ", expected +1";
            throw NumericalError(msg.str());
        }
    }
}

Eigen::Matrix2cd nc_gate_unitary_block(const NumberConservingGateSpec& g) {
    // U a_i^dag U^dag = sum_m V_im a_m^dag gives V = exp(i b^T): the row
    // index is the input mode. For b = s I + m . sigma,
    // exp(i b^T) = e^{is} (cos|m| I + i sinc|m| m'.sigma) with m_y flipped.
    const double s = 0.5 * (g.b_ii + g.b_jj);
    const double mz = 0.5 * (g.b_ii - g.b_jj);
    const double mx = g.b_ij.real();
    const double my = g.b_ij.imag();
    const double r = std::sqrt(mx * mx + my * my + mz * mz);
    const double c = std::cos(r);
    const double sc = (r == 0.0) ? 1.0 : std::sin(r) / r;
    Eigen::Matrix2cd u;
    u(0, 0) = Complex(c, sc * mz);
    u(1, 1) = Complex(c, -sc * mz);
    u(0, 1) = kI * sc * Complex(mx, -my);
    u(1, 0) = kI * sc * Complex(mx, my);
    return std::exp(kI * s) * u;
}

Eigen::Matrix4d general_gate_rotation_block(const GeneralQuadraticGateSpec& g) {
    const RMatrix alpha = g.alpha;
    const SkewCanonical canon = skew_canonical_form(alpha);
    RMatrix m = RMatrix::Zero(4, 4);
    m.block<2, 2>(0, 0) = plane_rotation(canon.eps[0]);
    m.block<2, 2>(2, 2) = plane_rotation(canon.eps[1]);
    const RMatrix canonical = canon.w.transpose() * m * canon.w;
    const RMatrix direct = matrix_exponential(alpha);
    const double gap = (canonical - direct).cwiseAbs().maxCoeff();
    if (gap > 1e-6) {
        std::ostringstream msg;
        msg << "canonical-route rotation disagrees with exp(alpha) by " << gap
            << "; R/T index conventions are inconsistent";
        throw NumericalError(msg.str());
    }
    return canonical;
}

bool circuit_is_number_conserving(const std::vector<GateSpec>& gates) {
    for (const auto& gate : gates) {
        if (std::holds_alternative<GeneralQuadraticGateSpec>(gate)) return false;
        if (const auto* p = std::get_if<PauliGateSpec>(&gate)) {
            if (!pauli_is_number_conserving(*p)) return false;
        }
    }
    return true;
}

CompiledCircuit compile_number_conserving(const std::vector<NumberConservingGateSpec>& gates, size_t n) {
    CompiledCircuit c = CompiledCircuit::identity_nc(n);
    for (const auto& g : gates) c.apply_nc_gate(g);
    c.check_integrity();
    return c;
}

CompiledCircuit compile_general(const std::vector<GeneralQuadraticGateSpec>& gates, size_t n) {
    CompiledCircuit c = CompiledCircuit::identity_general(n);
    for (const auto& g : gates) c.apply_general_gate(g);
    c.check_integrity();
    return c;
}

CompiledCircuit compile_circuit(const std::vector<GateSpec>& gates, size_t n) {
    for (const auto& g : gates) validate_gate(g, n);
    if (circuit_is_number_conserving(gates)) {
        CompiledCircuit c = CompiledCircuit::identity_nc(n);
        for (const auto& gate : gates) {
            if (const auto* p = std::get_if<PauliGateSpec>(&gate)) {
                const NumberConservingWithPhase ncp = pauli_to_number_conserving(*p);
                c.apply_nc_gate(ncp.spec);
                c.multiply_phase(std::exp(kI * ncp.identity_coeff));
            } else {
                c.apply_nc_gate(std::get<NumberConservingGateSpec>(gate));
            }
        }
        c.check_integrity();
        return c;
    }
    return compile_circuit_general(gates, n);
}

CompiledCircuit compile_circuit_general(const std::vector<GateSpec>& gates, size_t n) {
    CompiledCircuit c = CompiledCircuit::identity_general(n);
    for (const auto& gate : gates) {
        validate_gate(gate, n);
        if (const auto* p = std::get_if<PauliGateSpec>(&gate)) {
            c.apply_general_gate(fermionize_pauli(*p).spec);
        } else if (const auto* nc = std::get_if<NumberConservingGateSpec>(&gate)) {
            c.apply_general_gate(lift_number_conserving(*nc).spec);
        } else {
            c.apply_general_gate(std::get<GeneralQuadraticGateSpec>(gate));
        }
    }
    c.check_integrity();
    return c;
}

CMatrix t_matrix_from_r(const RMatrix& r) {
    const Eigen::Index two_n = r.rows();
    const Eigen::Index n = two_n / 2;
    CMatrix t(n, two_n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < two_n; ++j) {
            t(i, j) = 0.5 * Complex(r(j, 2 * i), r(j, 2 * i + 1));
        }
    }
    return t;
}

CMatrix t_matrix(const CompiledCircuit& circuit) {
    return t_matrix_from_r(circuit.r());
}

void apply_gate_rotation(RMatrix& r, const GateSpec& gate) {
    const size_t n = static_cast<size_t>(r.rows()) / 2;
    validate_gate(gate, n);
    GeneralQuadraticGateSpec gq;
    if (const auto* p = std::get_if<PauliGateSpec>(&gate)) {
        gq = fermionize_pauli(*p).spec;
    } else if (const auto* nc = std::get_if<NumberConservingGateSpec>(&gate)) {
        gq = lift_number_conserving(*nc).spec;
    } else {
        gq = std::get<GeneralQuadraticGateSpec>(gate);
    }
    right_multiply_rotation_block(r, general_gate_rotation_block(gq), gq.mode_i, gq.mode_j);
}

}  // namespace fermisim
