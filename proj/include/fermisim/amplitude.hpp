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

#include "fermisim/circuit.hpp"
#include "fermisim/fock.hpp"

namespace fermisim {

/// <y|U|x> for a number-conserving circuit: 0 across Hamming-weight
/// sectors, otherwise global_phase * det(V[rows = occupied(x),
/// cols = occupied(y)]).
Complex transition_amplitude(const CompiledCircuit& circuit, const FockState& x, const FockState& y);

/// |<y|U|x>|^2.
double transition_probability(const CompiledCircuit& circuit, const FockState& x, const FockState& y);

}  // namespace fermisim
