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

#include <string>
#include <vector>

#include "fermisim/adaptive.hpp"
#include "fermisim/gates.hpp"
#include "fermisim/rng.hpp"

namespace fermisim::checks {

/// Outcome of one verification suite: worst observed deviation vs the
/// tolerance it was held to.
struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tolerance = 0.0;
    size_t cases = 0;
    std::string detail;
};

// Random instance generators (deterministic in the rng).
NumberConservingGateSpec random_nc_gate(Rng& rng, size_t n);
GeneralQuadraticGateSpec random_general_gate(Rng& rng, size_t n);
PauliGateSpec random_balanced_pauli(Rng& rng, size_t n);
std::vector<GateSpec> random_nc_circuit(Rng& rng, size_t n, size_t max_gates);
std::vector<GateSpec> random_general_circuit(Rng& rng, size_t n, size_t max_gates);
FockState random_state(Rng& rng, size_t n);
OutcomeAssignment random_assignment(Rng& rng, size_t n, size_t k);

/// Random two-stage program whose second segment and subset depend on the
/// first outcome, plus its description for error messages.
AdaptiveProgram random_two_stage_program(Rng& rng, size_t n);

// Verification suites. `circuits` scales the workload; tolerances are
// fixed by the contract of each check.
CheckResult check_amplitude_oracle(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_weight_superselection(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_parity_superselection(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_marginals_nc(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_marginals_general(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_dual_path(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_normalization(size_t max_n, size_t circuits, uint64_t seed);
CheckResult check_pfaffian_kernel(size_t instances, uint64_t seed);
CheckResult check_compiled_structure(size_t instances, uint64_t seed);
CheckResult check_adaptive_exactness(size_t max_n, size_t programs, uint64_t seed);

/// All of the above with workloads suitable for a command-line self test.
std::vector<CheckResult> run_selftest(size_t max_n, uint64_t seed, bool inject_fault = false);

/// Survival function of the chi-square distribution (regularized upper
/// incomplete gamma Q(k/2, x/2)).
double chi_square_pvalue(double chi2, int dof);

/// One scaling measurement: compile a random general circuit, then draw a
/// single full-assignment sample from a half-filled input.
struct ScalingPoint {
    size_t n = 0;
    size_t gates = 0;
    size_t matrix_dim = 0;  // dominant Pfaffian matrix dimension
    double compile_seconds = 0;
    double sample_seconds = 0;
    double total_seconds = 0;
};
ScalingPoint scaling_point(size_t n, size_t gates, uint64_t seed);

/// Least-squares slope of log(total_seconds) against log(n).
double log_log_slope(const std::vector<ScalingPoint>& points);

}  // namespace fermisim::checks
