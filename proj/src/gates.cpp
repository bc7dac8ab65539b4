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

#include <array>
#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

namespace {

constexpr Complex kI(0.0, 1.0);

bool finite(double x) {
    return std::isfinite(x);
}

// Quadratic fermion Hamiltonians expanded over Majorana bilinears.
// Each a/a^dag is a linear form in the four local Majoranas
// (2i, 2i+1, 2j, 2j+1) -> local indices 0..3:
//   a_mu     = (c_{2mu} + i c_{2mu+1}) / 2
//   a_mu^dag = (c_{2mu} - i c_{2mu+1}) / 2
// Products accumulate coefficients h_kl of c_k c_l; the antisymmetric part
// gives alpha, the diagonal gives the identity coefficient (c_k^2 = I).
struct MajoranaAccumulator {
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();

    static std::array<Complex, 4> annihilator(int local_mode) {
        std::array<Complex, 4> v{0, 0, 0, 0};
        v[static_cast<size_t>(2 * local_mode)] = 0.5;
        v[static_cast<size_t>(2 * local_mode + 1)] = 0.5 * kI;
        return v;
    }
    static std::array<Complex, 4> creator(int local_mode) {
        std::array<Complex, 4> v{0, 0, 0, 0};
        v[static_cast<size_t>(2 * local_mode)] = 0.5;
        v[static_cast<size_t>(2 * local_mode + 1)] = -0.5 * kI;
        return v;
    }

    void add_product(Complex coeff, const std::array<Complex, 4>& u, const std::array<Complex, 4>& v) {
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) {
                h(k, l) += coeff * u[static_cast<size_t>(k)] * v[static_cast<size_t>(l)];
            }
        }
    }

    // H = (i/4) sum_{k != l} alpha_kl c_k c_l + identity * I
    MajoranaQuadratic finish(size_t mode_i, size_t mode_j) const {
        Eigen::Matrix4d alpha = Eigen::Matrix4d::Zero();
        Complex identity = 0;
        for (int k = 0; k < 4; ++k) {
            identity += h(k, k);
            for (int l = k + 1; l < 4; ++l) {
                const Complex hat = h(k, l) - h(l, k);
                const Complex a = -2.0 * kI * hat;
                if (std::abs(a.imag()) > 1e-12) {
                    throw InternalError("Majorana coefficient came out complex; Hermiticity bug");
                }
                alpha(k, l) = a.real();
                alpha(l, k) = -a.real();
            }
        }
        if (std::abs(identity.imag()) > 1e-12) {
            throw InternalError("identity coefficient came out complex; Hermiticity bug");
        }
        MajoranaQuadratic out;
        out.spec.mode_i = mode_i;
        out.spec.mode_j = mode_j;
        out.spec.alpha = alpha;
        out.identity_coeff = identity.real();
        return out;
    }
};

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, -kI, kI, 0;
    return m;
}
Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
        }
    }
    return out;
}

}  // namespace

void PauliGateSpec::validate(size_t n) const {
    if (qubit + 1 >= n) {
        std::ostringstream msg;
        msg << "pauli gate on qubits (" << qubit << "," << qubit + 1 << ") out of range for n=" << n;
        throw ValidationError(msg.str());
    }
    for (double c : {a1, b1, a2, b2, a3, b3}) {
        if (!finite(c)) throw ValidationError("pauli gate coefficients must be finite");
    }
}

void NumberConservingGateSpec::validate(size_t n) const {
    if (mode_i >= n || mode_j >= n) throw ValidationError("gate mode index out of range");
    if (mode_i == mode_j) throw ValidationError("gate modes must be distinct");
    if (!finite(b_ii) || !finite(b_jj) || !finite(b_ij.real()) || !finite(b_ij.imag())) {
        throw ValidationError("gate coefficients must be finite");
    }
}

Eigen::Matrix2cd NumberConservingGateSpec::block() const {
    Eigen::Matrix2cd b;
    b << Complex(b_ii, 0), b_ij, std::conj(b_ij), Complex(b_jj, 0);
    return b;
}

void GeneralQuadraticGateSpec::validate(size_t n) const {
    if (mode_i >= n || mode_j >= n) throw ValidationError("gate mode index out of range");
    if (mode_i == mode_j) throw ValidationError("gate modes must be distinct");
    if (!alpha.allFinite()) throw ValidationError("gate alpha block must be finite");
    if ((alpha + alpha.transpose()).cwiseAbs().maxCoeff() > kStructureTol) {
        throw ValidationError("gate alpha block must be antisymmetric");
    }
}

void validate_gate(const GateSpec& gate, size_t n) {
    std::visit([n](const auto& g) { g.validate(n); }, gate);
}

std::pair<size_t, size_t> gate_modes(const GateSpec& gate) {
    return std::visit(
        [](const auto& g) -> std::pair<size_t, size_t> {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, PauliGateSpec>) {
                return {g.qubit, g.qubit + 1};
            } else {
                return {g.mode_i, g.mode_j};
            }
        },
        gate);
}

MajoranaQuadratic fermionize_pauli(const PauliGateSpec& g) {
    // Under Jordan-Wigner with occupied = |1> and the standard Pauli
    // matrices, the adjacent-pair gate Hamiltonian becomes
    //   H = b_ii n_i + b_jj n_j + (b_ij a_i^dag a_j + h.c.)
    //                           + (g_p a_i^dag a_j^dag + h.c.) + (a1+b1) I
    // with the coefficients below.
    const double b_ii = -2.0 * g.a1;
    const double b_jj = -2.0 * g.b1;
    const Complex b_ij = Complex(g.a2 + g.b2, g.b3 - g.a3);
    const Complex pair = Complex(g.a2 - g.b2, g.a3 + g.b3);

    MajoranaAccumulator acc;
    const auto ai = MajoranaAccumulator::annihilator(0);
    const auto ci = MajoranaAccumulator::creator(0);
    const auto aj = MajoranaAccumulator::annihilator(1);
    const auto cj = MajoranaAccumulator::creator(1);

    acc.add_product(b_ii, ci, ai);
    acc.add_product(b_jj, cj, aj);
    acc.add_product(b_ij, ci, aj);
    acc.add_product(std::conj(b_ij), cj, ai);
    acc.add_product(pair, ci, cj);
    acc.add_product(std::conj(pair), aj, ai);

    MajoranaQuadratic out = acc.finish(g.qubit, g.qubit + 1);
    out.identity_coeff += g.a1 + g.b1;
    return out;
}

MajoranaQuadratic lift_number_conserving(const NumberConservingGateSpec& g) {
    MajoranaAccumulator acc;
    const auto ai = MajoranaAccumulator::annihilator(0);
    const auto ci = MajoranaAccumulator::creator(0);
    const auto aj = MajoranaAccumulator::annihilator(1);
    const auto cj = MajoranaAccumulator::creator(1);

    acc.add_product(g.b_ii, ci, ai);
    acc.add_product(g.b_jj, cj, aj);
    acc.add_product(g.b_ij, ci, aj);
    acc.add_product(std::conj(g.b_ij), cj, ai);

    return acc.finish(g.mode_i, g.mode_j);
}

bool pauli_is_number_conserving(const PauliGateSpec& g) {
    return g.a2 == g.b2 && g.a3 == -g.b3;
}

NumberConservingWithPhase pauli_to_number_conserving(const PauliGateSpec& g) {
    if (!pauli_is_number_conserving(g)) {
        throw ValidationError("pauli gate has pairing terms; no number-conserving form");
    }
    NumberConservingWithPhase out;
    out.spec.mode_i = g.qubit;
    out.spec.mode_j = g.qubit + 1;
    out.spec.b_ii = -2.0 * g.a1;
    out.spec.b_jj = -2.0 * g.b1;
    out.spec.b_ij = Complex(g.a2 + g.b2, g.b3 - g.a3);
    out.identity_coeff = g.a1 + g.b1;
    return out;
}

bool is_matchgate_unitary(const Eigen::Matrix4cd& u, double tol) {
    if (unitarity_defect(u) > tol) {
        throw ValidationError("matchgate check requires a unitary input");
    }
    // Even sector spans {|00>, |11>} (indices 0, 3), odd spans {|01>, |10>}.
    const int even[2] = {0, 3};
    const int odd[2] = {1, 2};
    double cross = 0;
    for (int a : even) {
        for (int b : odd) {
            cross = std::max(cross, std::abs(u(a, b)));
            cross = std::max(cross, std::abs(u(b, a)));
        }
    }
    if (cross > tol) return false;
    const Complex det_even = u(0, 0) * u(3, 3) - u(0, 3) * u(3, 0);
    const Complex det_odd = u(1, 1) * u(2, 2) - u(1, 2) * u(2, 1);
    return std::abs(det_even - det_odd) <= 10 * tol;
}

Eigen::Matrix4cd pauli_gate_hamiltonian(const PauliGateSpec& g) {
    const Eigen::Matrix2cd x = pauli_x();
    const Eigen::Matrix2cd y = pauli_y();
    const Eigen::Matrix2cd z = pauli_z();
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h += g.a1 * kron2(z, id);
    h += g.b1 * kron2(id, z);
    h += g.a2 * kron2(x, x);
    h += g.b2 * kron2(y, y);
    h += g.a3 * kron2(x, y);
    h += g.b3 * kron2(y, x);
    return h;
}

Eigen::Matrix4cd hermitian_expi(const Eigen::Matrix4cd& h) {
    if (hermiticity_defect(h) > kStructureTol) {
        throw ValidationError("expi requires a Hermitian matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    Eigen::Vector4cd phases;
    for (int k = 0; k < 4; ++k) {
        phases(k) = std::exp(kI * Complex(es.eigenvalues()(k), 0));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::Matrix4cd pauli_gate_unitary(const PauliGateSpec& g) {
    return hermitian_expi(pauli_gate_hamiltonian(g));
}

Eigen::Matrix4cd majorana_local_hamiltonian(const Eigen::Matrix4d& alpha) {
    const Eigen::Matrix2cd x = pauli_x();
    const Eigen::Matrix2cd y = pauli_y();
    const Eigen::Matrix2cd z = pauli_z();
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const std::array<Eigen::Matrix4cd, 4> c = {
        kron2(x, id),  // c_{2i}
        kron2(y, id),  // c_{2i+1}
        kron2(z, x),   // c_{2j}
        kron2(z, y),   // c_{2j+1}
    };
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            if (k == l) continue;
            h += (kI / 4.0) * alpha(k, l) * (c[static_cast<size_t>(k)] * c[static_cast<size_t>(l)]);
        }
    }
    return h;
}

}  // namespace fermisim
