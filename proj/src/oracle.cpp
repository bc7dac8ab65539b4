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

#include "fermisim/oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

namespace {

// 4x4 sector Hamiltonian of a number-conserving gate over ordered modes
// (p, q), p < q; basis |x_p x_q| -> 2*x_p + x_q. B entries follow the
// canonicalized orientation (swapping mode labels conjugates the hopping).
Eigen::Matrix4cd nc_sector_hamiltonian(const NumberConservingGateSpec& g, size_t& p, size_t& q) {
    double bpp = g.b_ii;
    double bqq = g.b_jj;
    Complex bpq = g.b_ij;
    p = g.mode_i;
    q = g.mode_j;
    if (p > q) {
        std::swap(p, q);
        std::swap(bpp, bqq);
        bpq = std::conj(bpq);
    }
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h(1, 1) = bqq;
    h(2, 2) = bpp;
    h(3, 3) = bpp + bqq;
    h(2, 1) = bpq;
    h(1, 2) = std::conj(bpq);
    return h;
}

Eigen::Matrix4cd general_sector_hamiltonian(const GeneralQuadraticGateSpec& g, size_t& p, size_t& q) {
    p = g.mode_i;
    q = g.mode_j;
    Eigen::Matrix4d alpha = g.alpha;
    if (p > q) {
        std::swap(p, q);
        // Reorder the Majorana block from (j-pair, i-pair) to (p-pair, q-pair).
        const int perm[4] = {2, 3, 0, 1};
        Eigen::Matrix4d reordered;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                reordered(r, c) = alpha(perm[r], perm[c]);
            }
        }
        alpha = reordered;
    }
    return majorana_local_hamiltonian(alpha);
}

}  // namespace

StateVector::StateVector(size_t n) : n_(n) {
    if (n_ > kMaxModes) {
        std::ostringstream msg;
        msg << "oracle supports at most " << kMaxModes << " modes, got " << n_;
        throw ValidationError(msg.str());
    }
    amp_ = CVector::Zero(static_cast<Eigen::Index>(uint64_t{1} << n_));
}

StateVector StateVector::basis(const FockState& x) {
    StateVector s(x.num_modes());
    s.amp_(static_cast<Eigen::Index>(x.to_index())) = 1.0;
    return s;
}

Complex StateVector::amplitude(const FockState& y) const {
    if (y.num_modes() != n_) throw ValidationError("mode count mismatch");
    return amp_(static_cast<Eigen::Index>(y.to_index()));
}

double StateVector::norm() const {
    return amp_.norm();
}

void StateVector::apply_gate(const GateSpec& gate) {
    validate_gate(gate, n_);
    const double norm_before = norm();

    if (const auto* pg = std::get_if<PauliGateSpec>(&gate)) {
        // Pauli gates are qubit-local; no string sign.
        const Eigen::Matrix4cd u = pauli_gate_unitary(*pg);
        const size_t p = pg->qubit;
        const size_t q = pg->qubit + 1;
        apply_sector_unitary(u, p, q, /*use_string=*/false);
    } else if (const auto* nc = std::get_if<NumberConservingGateSpec>(&gate)) {
        size_t p = 0, q = 0;
        const Eigen::Matrix4cd h = nc_sector_hamiltonian(*nc, p, q);
        apply_sector_unitary(hermitian_expi(h), p, q, /*use_string=*/true);
    } else {
        const auto& gq = std::get<GeneralQuadraticGateSpec>(gate);
        size_t p = 0, q = 0;
        const Eigen::Matrix4cd h = general_sector_hamiltonian(gq, p, q);
        apply_sector_unitary(hermitian_expi(h), p, q, /*use_string=*/true);
    }

    // Gates are unitary, so they preserve the norm of any state, including
    // projected (unnormalized) ones.
    if (norm_before > 1e-150 && std::abs(norm() / norm_before - 1.0) > 1e-9) {
        throw NumericalError("oracle state norm drifted after a gate");
    }
}

void StateVector::apply_sector_unitary(const Eigen::Matrix4cd& u, size_t p, size_t q, bool use_string) {
    const uint64_t bp = uint64_t{1} << (n_ - 1 - p);
    const uint64_t bq = uint64_t{1} << (n_ - 1 - q);
    // Occupied modes strictly between p and q (in mode order).
    uint64_t between = 0;
    for (size_t m = p + 1; m < q; ++m) between |= uint64_t{1} << (n_ - 1 - m);

    const uint64_t dim = uint64_t{1} << n_;
    Eigen::Vector4cd in, out;
    for (uint64_t idx = 0; idx < dim; ++idx) {
        if ((idx & bp) != 0 || (idx & bq) != 0) continue;
        const double s =
            (use_string && (std::popcount(idx & between) % 2 == 1)) ? -1.0 : 1.0;
        const auto i00 = static_cast<Eigen::Index>(idx);
        const auto i01 = static_cast<Eigen::Index>(idx | bq);
        const auto i10 = static_cast<Eigen::Index>(idx | bp);
        const auto i11 = static_cast<Eigen::Index>(idx | bp | bq);
        in << amp_(i00), s * amp_(i01), amp_(i10), s * amp_(i11);
        out = u * in;
        amp_(i00) = out(0);
        amp_(i01) = s * out(1);
        amp_(i10) = out(2);
        amp_(i11) = s * out(3);
    }
}

double StateVector::project(const OutcomeAssignment& y) {
    if (y.subset().n() != n_) throw ValidationError("mode count mismatch");
    double mass = 0.0;
    const uint64_t dim = uint64_t{1} << n_;
    for (uint64_t idx = 0; idx < dim; ++idx) {
        bool keep = true;
        for (size_t k = 0; k < y.size(); ++k) {
            const size_t mode = y.subset().modes()[k];
            const uint64_t bit = (idx >> (n_ - 1 - mode)) & 1u;
            if (bit != y.bits()[k]) {
                keep = false;
                break;
            }
        }
        if (keep) {
            mass += std::norm(amp_(static_cast<Eigen::Index>(idx)));
        } else {
            amp_(static_cast<Eigen::Index>(idx)) = 0.0;
        }
    }
    return mass;
}

void StateVector::renormalize(double mass) {
    if (mass < 1e-300) throw NumericalError("cannot renormalize a zero-probability branch");
    amp_ /= std::sqrt(mass);
}

Complex oracle_amplitude(const std::vector<GateSpec>& gates, const FockState& x, const FockState& y) {
    if (x.num_modes() != y.num_modes()) throw ValidationError("mode count mismatch");
    StateVector s = StateVector::basis(x);
    for (const auto& g : gates) s.apply_gate(g);
    return s.amplitude(y);
}

double oracle_marginal(const std::vector<GateSpec>& gates, const FockState& x, const OutcomeAssignment& y) {
    StateVector s = StateVector::basis(x);
    for (const auto& g : gates) s.apply_gate(g);
    return s.project(y);
}

}  // namespace fermisim
