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

#include "fermisim/amplitude.hpp"

#include "fermisim/errors.hpp"

namespace fermisim {

Complex transition_amplitude(const CompiledCircuit& circuit, const FockState& x, const FockState& y) {
    if (x.num_modes() != circuit.num_modes() || y.num_modes() != circuit.num_modes()) {
        throw ValidationError("mode count mismatch");
    }
    if (x.hamming_weight() != y.hamming_weight()) return Complex(0.0, 0.0);

    const std::vector<size_t> rows = x.occupied_modes();
    const std::vector<size_t> cols = y.occupied_modes();
    const auto k = static_cast<Eigen::Index>(rows.size());
    const CMatrix& v = circuit.v();
    CMatrix sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            sub(a, b) = v(static_cast<Eigen::Index>(rows[static_cast<size_t>(a)]),
                          static_cast<Eigen::Index>(cols[static_cast<size_t>(b)]));
        }
    }
    return circuit.global_phase() * determinant(sub);
}

double transition_probability(const CompiledCircuit& circuit, const FockState& x, const FockState& y) {
    return std::norm(transition_amplitude(circuit, x, y));
}

}  // namespace fermisim
