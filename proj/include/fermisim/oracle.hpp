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

#include "fermisim/fock.hpp"
#include "fermisim/gates.hpp"
#include "fermisim/linalg.hpp"

namespace fermisim {

/// Brute-force 2^n statevector used as the correctness oracle. Gates act
/// through their fermionic operator content: each two-mode gate is a 4x4
/// sector unitary plus the Jordan-Wigner string sign over the modes
/// strictly between the pair, so non-adjacent gates act correctly.
class StateVector {
  public:
    static constexpr size_t kMaxModes = 14;

    explicit StateVector(size_t n);
    static StateVector basis(const FockState& x);

    size_t num_modes() const { return n_; }
    Complex amplitude(const FockState& y) const;
    Complex amplitude(uint64_t index) const { return amp_(static_cast<Eigen::Index>(index)); }
    double norm() const;
    size_t dimension() const { return static_cast<size_t>(amp_.size()); }

    void apply_gate(const GateSpec& gate);

    /// Zeroes every amplitude inconsistent with the assignment and returns
    /// the projected probability mass. Does not renormalize.
    double project(const OutcomeAssignment& y);

    /// Divides by sqrt(mass); throws NumericalError when mass is ~0.
    void renormalize(double mass);

  private:
    /// Applies a 4x4 unitary on the occupation sector of modes (p, q),
    /// p < q, basis |x_p x_q> -> 2 x_p + x_q. With use_string, off-sector
    /// couplings pick up the parity of the modes strictly between p and q
    /// (conjugation by diag(1, s, 1, s)).
    void apply_sector_unitary(const Eigen::Matrix4cd& u, size_t p, size_t q, bool use_string);

    size_t n_;
    CVector amp_;
};

Complex oracle_amplitude(const std::vector<GateSpec>& gates, const FockState& x, const FockState& y);

double oracle_marginal(const std::vector<GateSpec>& gates, const FockState& x, const OutcomeAssignment& y);

}  // namespace fermisim
