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

#include <functional>
#include <string>
#include <vector>

#include "fermisim/circuit.hpp"
#include "fermisim/fock.hpp"
#include "fermisim/rng.hpp"
#include "fermisim/tables.hpp"

namespace fermisim {

struct StageResult {
    OutcomeAssignment outcome;
    double conditional_probability = 1.0;
    double joint_probability = 1.0;  // cumulative product of conditionals
};

struct MeasurementRecord {
    uint64_t seed = 0;
    std::string rng_algorithm = kRngAlgorithm;
    std::vector<StageResult> stages;

    double joint_probability() const {
        return stages.empty() ? 1.0 : stages.back().joint_probability;
    }
    std::vector<OutcomeAssignment> assignments() const;
    /// Stage outcomes joined with '|', e.g. "10|0".
    std::string outcomes_string() const;
    /// Concatenated outcome bits of all stages, the decision-table key.
    std::string outcome_key() const;
    bool measured(size_t mode) const;
};

/// Staged program: each stage selects a unitary segment and a measurement
/// subset as deterministic functions of the outcomes recorded so far.
/// Measured modes retire: later subsets must be disjoint from them and
/// later gates must not touch them (enforced during execution).
class AdaptiveProgram {
  public:
    using SegmentSelector = std::function<std::vector<GateSpec>(const MeasurementRecord&)>;
    using SubsetSelector = std::function<ModeSubset(const MeasurementRecord&)>;

    struct Stage {
        SegmentSelector segment;
        SubsetSelector subset;
    };

    AdaptiveProgram(size_t n, std::vector<Stage> stages);

    /// Unconditioned stage.
    static Stage fixed_stage(std::vector<GateSpec> gates, ModeSubset subset);

    size_t num_modes() const { return n_; }
    size_t num_stages() const { return stages_.size(); }
    const Stage& stage(size_t s) const { return stages_.at(s); }

  private:
    size_t n_;
    std::vector<Stage> stages_;
};

enum class SamplerMode {
    automatic,    // reference below the size threshold, incremental above
    reference,    // one Table III Pfaffian per conditional (the contract path)
    incremental,  // shared Schur-complement state, O(m^2) per bit
};

struct SampledOutcome {
    std::vector<uint8_t> bits;
    double conditional_probability = 1.0;          // of the whole subset outcome
    std::vector<double> bit_conditionals;          // per sampled bit, in mode order
};

/// Samples the outcome of measuring `subset` after the evolution described
/// by t_chain (one T per stage; the last entry belongs to the current
/// stage). Bits are drawn one mode at a time in ascending mode order; each
/// conditional is p(prefix & next=1 | x, prior) / p(prefix | x, prior).
SampledOutcome sample_subset_outcome(const std::vector<CMatrix>& t_chain, const FockState& x,
                                     const std::vector<OutcomeAssignment>& prior,
                                     const ModeSubset& subset, Rng& rng,
                                     SamplerMode mode = SamplerMode::automatic);

/// Runs the staged simulation: compile segment, extend the cumulative
/// rotation, sample the stage subset, repeat. Deterministic given
/// (program, x, seed).
MeasurementRecord run_adaptive(const AdaptiveProgram& program, const FockState& x, uint64_t seed,
                               SamplerMode mode = SamplerMode::automatic);

/// Exact probability of a complete record, recomputed from scratch via the
/// Table III Pfaffian. Throws ValidationError if the record is
/// inconsistent with the program's selectors.
double exact_record_probability(const AdaptiveProgram& program, const FockState& x,
                                const MeasurementRecord& record);

/// All records with nonzero-support structure, exhaustively enumerated
/// (testing aid; the outcome tree must stay under 2^20 leaves).
std::vector<MeasurementRecord> enumerate_records(const AdaptiveProgram& program, const FockState& x);

// Collapse-oracle counterparts (unitary -> project -> renormalize), used to
// cross-check the Pfaffian machinery at small n.
double oracle_record_probability(const AdaptiveProgram& program, const FockState& x,
                                 const MeasurementRecord& record);
MeasurementRecord oracle_sample_record(const AdaptiveProgram& program, const FockState& x, uint64_t seed);

}  // namespace fermisim
