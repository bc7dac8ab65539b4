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

#include "fermisim/adaptive.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fermisim/errors.hpp"
#include "test_util.hpp"

using namespace fermisim;

namespace {

NumberConservingGateSpec hopping(size_t i, size_t j, double theta) {
    NumberConservingGateSpec g;
    g.mode_i = i;
    g.mode_j = j;
    g.b_ij = theta;
    return g;
}

PauliGateSpec pairing_gate(size_t qubit, double strength) {
    PauliGateSpec g;
    g.qubit = qubit;
    g.a3 = strength;
    return g;
}

std::string serialize(const MeasurementRecord& r) {
    std::ostringstream os;
    os << r.rng_algorithm << ':' << r.seed << ':' << r.outcomes_string();
    os.precision(17);
    for (const auto& s : r.stages) {
        os << '|' << s.conditional_probability << ',' << s.joint_probability;
    }
    return os.str();
}

// Two-stage program: hop then measure mode 0; the second segment is an
// occupation swap on (2,3) applied only when the first outcome was 1.
AdaptiveProgram conditioned_program(double theta) {
    std::vector<AdaptiveProgram::Stage> stages;
    stages.push_back(AdaptiveProgram::fixed_stage({hopping(0, 1, theta)}, ModeSubset(4, {0})));
    stages.push_back(AdaptiveProgram::Stage{
        [](const MeasurementRecord& r) -> std::vector<GateSpec> {
            if (r.outcome_key() == "1") return {hopping(2, 3, M_PI / 2)};
            return {};
        },
        [](const MeasurementRecord&) { return ModeSubset(4, {2}); },
    });
    return AdaptiveProgram(4, std::move(stages));
}

}  // namespace

TEST_CASE("identity circuit: sampling is deterministic and faithful") {
    const FockState x = FockState::from_string("1010");
    AdaptiveProgram program(
        4, {AdaptiveProgram::fixed_stage({}, ModeSubset(4, {0, 1, 2, 3}))});
    for (uint64_t seed : {1ull, 7ull, 123456789ull}) {
        const MeasurementRecord r = run_adaptive(program, x, seed);
        CHECK(r.stages.size() == 1);
        CHECK(r.stages[0].outcome.bits_string() == "1010");
        CHECK(r.joint_probability() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.rng_algorithm == std::string("mt19937_64"));
    }
}

TEST_CASE("single-mode frequency matches the analytic probability") {
    // hop(pi/4) from |10>: measuring mode 0 gives 1 with probability 1/2.
    AdaptiveProgram program(
        2, {AdaptiveProgram::fixed_stage({hopping(0, 1, M_PI / 4)}, ModeSubset(2, {0}))});
    const FockState x = FockState::from_string("10");
    const int shots = 100000;
    int ones = 0;
    for (int s = 0; s < shots; ++s) {
        const MeasurementRecord r = run_adaptive(program, x, derive_subseed(99, static_cast<uint64_t>(s)));
        ones += r.stages[0].outcome.bits()[0];
        CHECK(r.stages[0].conditional_probability == doctest::Approx(0.5).epsilon(1e-9));
    }
    // 3 sigma binomial band around p = 1/2.
    const double sigma = std::sqrt(0.25 * shots);
    CHECK(std::abs(ones - 0.5 * shots) < 3 * sigma);
}

TEST_CASE("pairing circuit from vacuum only produces even-parity outcomes") {
    AdaptiveProgram program(
        2, {AdaptiveProgram::fixed_stage({pairing_gate(0, 0.9)}, ModeSubset(2, {0, 1}))});
    const FockState vac = FockState::vacuum(2);
    for (int s = 0; s < 500; ++s) {
        const MeasurementRecord r = run_adaptive(program, vac, derive_subseed(5, static_cast<uint64_t>(s)));
        const std::string bits = r.stages[0].outcome.bits_string();
        CHECK((bits == "00" || bits == "11"));
    }
}

TEST_CASE("one-stage run equals sample_subset_outcome") {
    const double theta = 1.1;
    AdaptiveProgram program(
        3, {AdaptiveProgram::fixed_stage({hopping(0, 2, theta)}, ModeSubset(3, {0, 1}))});
    const FockState x = FockState::from_string("101");

    const MeasurementRecord r = run_adaptive(program, x, 42);

    RMatrix rot = RMatrix::Identity(6, 6);
    apply_gate_rotation(rot, hopping(0, 2, theta));
    Rng rng(42);
    const SampledOutcome s =
        sample_subset_outcome({t_matrix_from_r(rot)}, x, {}, ModeSubset(3, {0, 1}), rng);
    CHECK(r.stages[0].outcome.bits() == s.bits);
    CHECK(r.stages[0].conditional_probability == doctest::Approx(s.conditional_probability));
}

TEST_CASE("records are byte-for-byte reproducible") {
    const AdaptiveProgram program = conditioned_program(0.8);
    const FockState x = FockState::from_string("1010");
    const MeasurementRecord a = run_adaptive(program, x, 2024);
    const MeasurementRecord b = run_adaptive(program, x, 2024);
    CHECK(serialize(a) == serialize(b));
    // Chain rule: stored joint is the product of conditionals.
    double prod = 1.0;
    for (const auto& s : a.stages) {
        prod *= s.conditional_probability;
    }
    CHECK(std::abs(prod - a.joint_probability()) <= 1e-12);
}

TEST_CASE("exact_record_probability agrees with sampled records and the oracle") {
    const AdaptiveProgram program = conditioned_program(0.8);
    const FockState x = FockState::from_string("1010");
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const MeasurementRecord r = run_adaptive(program, x, seed);
        const double exact = exact_record_probability(program, x, r);
        CHECK(exact == doctest::Approx(r.joint_probability()).epsilon(1e-9));
        CHECK(oracle_record_probability(program, x, r) == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("identity program: full-assignment record has probability 1") {
    AdaptiveProgram program(
        3, {AdaptiveProgram::fixed_stage({}, ModeSubset(3, {0, 1, 2}))});
    const FockState x = FockState::from_string("011");
    const MeasurementRecord r = run_adaptive(program, x, 0);
    CHECK(r.stages[0].outcome.bits_string() == "011");
    CHECK(exact_record_probability(program, x, r) == doctest::Approx(1.0));
}

TEST_CASE("enumerated record probabilities sum to 1 and match the oracle") {
    const AdaptiveProgram program = conditioned_program(0.6);
    const FockState x = FockState::from_string("1010");
    const auto records = enumerate_records(program, x);
    CHECK(records.size() == 4);  // 2 outcomes per stage
    double total = 0.0;
    for (const auto& r : records) {
        total += r.joint_probability();
        CHECK(oracle_record_probability(program, x, r) ==
              doctest::Approx(r.joint_probability()).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled two-stage distribution matches the collapse oracle") {
    const AdaptiveProgram program = conditioned_program(0.8);
    const FockState x = FockState::from_string("1010");

    std::map<std::string, double> exact;
    for (const auto& r : enumerate_records(program, x)) {
        exact[r.outcomes_string()] = oracle_record_probability(program, x, r);
    }

    const int shots = 100000;
    std::map<std::string, int> counts;
    for (int s = 0; s < shots; ++s) {
        counts[run_adaptive(program, x, derive_subseed(31337, static_cast<uint64_t>(s))).outcomes_string()]++;
    }
    double tv = 0.0;
    for (const auto& [key, p] : exact) {
        tv += std::abs(static_cast<double>(counts[key]) / shots - p);
    }
    CHECK(tv / 2 <= 0.01);
}

TEST_CASE("unconditioned two-stage program equals the non-adaptive joint") {
    std::vector<AdaptiveProgram::Stage> stages;
    stages.push_back(AdaptiveProgram::fixed_stage({hopping(0, 1, 0.7)}, ModeSubset(4, {1})));
    stages.push_back(AdaptiveProgram::fixed_stage({hopping(2, 3, 0.4)}, ModeSubset(4, {2, 3})));
    const AdaptiveProgram program(4, std::move(stages));
    const FockState x = FockState::from_string("1001");

    RMatrix rot = RMatrix::Identity(8, 8);
    apply_gate_rotation(rot, hopping(0, 1, 0.7));
    const CMatrix t1 = t_matrix_from_r(rot);
    apply_gate_rotation(rot, hopping(2, 3, 0.4));
    const CMatrix t12 = t_matrix_from_r(rot);

    for (const auto& r : enumerate_records(program, x)) {
        const double direct = joint_probability({t1, t12}, x, r.assignments());
        CHECK(r.joint_probability() == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("reference and incremental samplers agree") {
    std::mt19937_64 gen(91);
    const size_t n = 10;
    std::vector<GateSpec> gates;
    for (int g = 0; g < 25; ++g) {
        const size_t i = gen() % n;
        size_t j = gen() % n;
        while (j == i) j = gen() % n;
        GeneralQuadraticGateSpec gq;
        gq.mode_i = i;
        gq.mode_j = j;
        Eigen::Matrix4d a;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) a(r, c) = test::uniform(gen);
        }
        gq.alpha = 0.5 * (a - a.transpose());
        gates.push_back(gq);
    }
    const auto two_n = static_cast<Eigen::Index>(2 * n);
    RMatrix rot = RMatrix::Identity(two_n, two_n);
    for (const auto& g : gates) apply_gate_rotation(rot, g);
    const CMatrix t = t_matrix_from_r(rot);
    const FockState x = FockState::from_string("1010110010");
    const ModeSubset subset(n, {0, 2, 3, 5, 6, 9});

    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng r1(seed), r2(seed);
        const SampledOutcome a = sample_subset_outcome({t}, x, {}, subset, r1, SamplerMode::reference);
        const SampledOutcome b =
            sample_subset_outcome({t}, x, {}, subset, r2, SamplerMode::incremental);
        CHECK(a.bits == b.bits);
        REQUIRE(a.bit_conditionals.size() == b.bit_conditionals.size());
        for (size_t k = 0; k < a.bit_conditionals.size(); ++k) {
            CHECK(a.bit_conditionals[k] == doctest::Approx(b.bit_conditionals[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("reference and incremental samplers agree with a prior stage") {
    const double theta = 0.9;
    const size_t n = 6;
    RMatrix rot = RMatrix::Identity(12, 12);
    apply_gate_rotation(rot, hopping(0, 3, theta));
    const CMatrix t1 = t_matrix_from_r(rot);
    apply_gate_rotation(rot, pairing_gate(1, 0.5));
    const CMatrix t12 = t_matrix_from_r(rot);

    const FockState x = FockState::from_string("101010");
    const std::vector<OutcomeAssignment> prior = {OutcomeAssignment(ModeSubset(n, {0}), {1})};
    const ModeSubset subset(n, {1, 2, 4});
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng r1(seed), r2(seed);
        const SampledOutcome a =
            sample_subset_outcome({t1, t12}, x, prior, subset, r1, SamplerMode::reference);
        const SampledOutcome b =
            sample_subset_outcome({t1, t12}, x, prior, subset, r2, SamplerMode::incremental);
        CHECK(a.bits == b.bits);
        CHECK(a.conditional_probability == doctest::Approx(b.conditional_probability).epsilon(1e-9));
    }
}

TEST_CASE("program validation failures") {
    // Stage 2 gate touches the measured mode 0.
    std::vector<AdaptiveProgram::Stage> stages;
    stages.push_back(AdaptiveProgram::fixed_stage({}, ModeSubset(2, {0})));
    stages.push_back(AdaptiveProgram::fixed_stage({hopping(0, 1, 0.3)}, ModeSubset(2, {1})));
    const AdaptiveProgram program(2, std::move(stages));
    CHECK_THROWS_AS(run_adaptive(program, FockState::from_string("10"), 1), ValidationError);

    // Stage 2 subset overlaps the measured mode.
    std::vector<AdaptiveProgram::Stage> stages2;
    stages2.push_back(AdaptiveProgram::fixed_stage({}, ModeSubset(2, {0})));
    stages2.push_back(AdaptiveProgram::fixed_stage({}, ModeSubset(2, {0, 1})));
    const AdaptiveProgram program2(2, std::move(stages2));
    CHECK_THROWS_AS(run_adaptive(program2, FockState::from_string("10"), 1), ValidationError);

    // Record inconsistent with the program's subsets.
    const AdaptiveProgram good(2, {AdaptiveProgram::fixed_stage({}, ModeSubset(2, {0}))});
    MeasurementRecord bad;
    bad.stages.push_back(StageResult{OutcomeAssignment(ModeSubset(2, {1}), {0}), 1.0, 1.0});
    CHECK_THROWS_AS(exact_record_probability(good, FockState::from_string("10"), bad),
                    ValidationError);
}

TEST_CASE("conditioning on an impossible prefix is a loud error") {
    // Identity circuit from |10>: mode 0 must read 1, so a prior outcome of
    // 0 has probability zero.
    const size_t n = 2;
    const CMatrix t = t_matrix_from_r(RMatrix::Identity(4, 4));
    const std::vector<OutcomeAssignment> prior = {OutcomeAssignment(ModeSubset(n, {0}), {0})};
    const FockState x = FockState::from_string("10");
    Rng rng(3);
    CHECK_THROWS_AS(
        sample_subset_outcome({t, t}, x, prior, ModeSubset(n, {1}), rng, SamplerMode::reference),
        NumericalError);
    Rng rng2(3);
    CHECK_THROWS_AS(
        sample_subset_outcome({t, t}, x, prior, ModeSubset(n, {1}), rng2, SamplerMode::incremental),
        NumericalError);
}

TEST_CASE("oracle sampler agrees with engine sampling distributions") {
    const AdaptiveProgram program = conditioned_program(0.5);
    const FockState x = FockState::from_string("1010");
    std::map<std::string, int> engine_counts, oracle_counts;
    const int shots = 20000;
    for (int s = 0; s < shots; ++s) {
        engine_counts[run_adaptive(program, x, derive_subseed(7, static_cast<uint64_t>(s))).outcomes_string()]++;
        oracle_counts[oracle_sample_record(program, x, derive_subseed(8, static_cast<uint64_t>(s))).outcomes_string()]++;
    }
    double tv = 0.0;
    for (const auto& [key, cnt] : engine_counts) {
        tv += std::abs(cnt - static_cast<double>(oracle_counts[key])) / shots;
    }
    CHECK(tv / 2 < 0.02);
}
