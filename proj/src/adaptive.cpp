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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"
#include "fermisim/oracle.hpp"

namespace fermisim {

namespace {

// Below this final matrix dimension a fresh Pfaffian per conditional is
// cheap; above it the shared Schur-complement state wins.
constexpr Eigen::Index kIncrementalThreshold = 192;

constexpr double kDegenerateTol = 1e-12;

double clamp_probability(double p, const char* what) {
    if (!std::isfinite(p) || p < -1e-6 || p > 1.0 + 1e-6) {
        std::ostringstream msg;
        msg << what << " " << p << " outside [0, 1]";
        throw NumericalError(msg.str());
    }
    return std::min(1.0, std::max(0.0, p));
}

void check_subset_unmeasured(const ModeSubset& subset, const MeasurementRecord& record) {
    for (size_t m : subset.modes()) {
        if (record.measured(m)) {
            std::ostringstream msg;
            msg << "mode " << m << " was already measured in an earlier stage";
            throw ValidationError(msg.str());
        }
    }
}

void check_gates_unmeasured(const std::vector<GateSpec>& gates, size_t n,
                            const MeasurementRecord& record, size_t stage_index) {
    for (size_t g = 0; g < gates.size(); ++g) {
        validate_gate(gates[g], n);
        const auto [i, j] = gate_modes(gates[g]);
        for (size_t m : {i, j}) {
            if (record.measured(m)) {
                std::ostringstream msg;
                msg << "stage " << stage_index + 1 << " gate " << g + 1 << " acts on measured mode "
                    << m;
                throw ValidationError(msg.str());
            }
        }
    }
}

// The reference sampler: one joint_probability evaluation per candidate,
// conditioning by division, exactly the chain-rule contract.
SampledOutcome sample_reference(const std::vector<CMatrix>& t_chain, const FockState& x,
                                const std::vector<OutcomeAssignment>& prior,
                                const ModeSubset& subset, Rng& rng) {
    const size_t n = x.num_modes();
    std::vector<OutcomeAssignment> stages = prior;
    stages.push_back(OutcomeAssignment::empty(n));

    double j_prev = joint_probability(t_chain, x, stages);

    std::vector<size_t> drawn_modes;
    std::vector<uint8_t> drawn_bits;
    SampledOutcome out;
    out.conditional_probability = 1.0;

    for (size_t mode : subset.modes()) {
        auto with_bit = [&](uint8_t b) {
            std::vector<size_t> modes = drawn_modes;
            std::vector<uint8_t> bits = drawn_bits;
            modes.push_back(mode);
            bits.push_back(b);
            std::vector<OutcomeAssignment> ext = stages;
            ext.back() = OutcomeAssignment(ModeSubset(n, std::move(modes)), std::move(bits));
            return joint_probability(t_chain, x, ext);
        };

        const double j1 = with_bit(1);
        double p1;
        double j0 = -1.0;  // computed lazily
        if (j_prev < kDegenerateTol) {
            j0 = with_bit(0);
            if (j0 < kDegenerateTol && j1 < kDegenerateTol) {
                throw NumericalError("degenerate distribution: prefix and both extensions ~0");
            }
            p1 = j1 / (j0 + j1);
        } else {
            if (j1 > j_prev * (1.0 + 1e-6) + 1e-9) {
                throw NumericalError("joint probability grew along the chain");
            }
            p1 = j1 / j_prev;
        }
        p1 = clamp_probability(p1, "bit conditional");

        const uint8_t bit = rng.uniform01() < p1 ? 1 : 0;
        double cond;
        if (bit) {
            cond = p1;
            j_prev = j1;
        } else {
            if (j0 < 0.0) j0 = with_bit(0);
            cond = clamp_probability(j_prev > 0.0 ? j0 / j_prev : 0.0, "bit conditional");
            j_prev = j0;
        }
        drawn_modes.push_back(mode);
        drawn_bits.push_back(bit);
        out.bits.push_back(bit);
        out.bit_conditionals.push_back(cond);
        out.conditional_probability *= cond;
    }
    return out;
}

// Incremental sampler. Keeps the inverse of the growing Table III matrix in
// append order (committed operators first, sampled pairs appended at the
// end); each bit conditional is the 2x2 Schur-complement Pfaffian
//   sigma = gamma + b_first^T A^-1 b_second,
// which equals p(prefix & bit | x, prior) / p(prefix | x, prior).
class IncrementalSampler {
  public:
    IncrementalSampler(const std::vector<CMatrix>& t_chain, const FockState& x,
                       const std::vector<OutcomeAssignment>& prior, size_t capacity_pairs)
        : kernel_(t_chain) {
        const size_t n = x.num_modes();
        std::vector<OutcomeAssignment> base_stages = prior;
        base_stages.push_back(OutcomeAssignment::empty(n));
        stage_ = base_stages.size() - 1;

        // String order of the committed operators equals append order; the
        // insertion point for new pairs sits after the forward blocks.
        const std::vector<StringOp> base = majorana_operator_string(x, base_stages);
        size_t cut = x.hamming_weight();
        for (size_t s = 0; s + 1 < base_stages.size(); ++s) cut += 2 * base_stages[s].size();

        ops_.reserve(base.size() + 2 * capacity_pairs);
        for (size_t i = 0; i < base.size(); ++i) {
            ops_.push_back({base[i], i < cut ? OrderZone::before : OrderZone::after, i});
        }

        const auto d = static_cast<Eigen::Index>(base.size());
        const auto cap = d + 2 * static_cast<Eigen::Index>(capacity_pairs);
        ainv_ = CMatrix::Zero(cap, cap);
        if (d > 0) {
            CMatrix m(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                m(i, i) = 0.0;
                for (Eigen::Index j = i + 1; j < d; ++j) {
                    const Complex val = kernel_.contract(base[static_cast<size_t>(i)],
                                                         base[static_cast<size_t>(j)]);
                    m(i, j) = val;
                    m(j, i) = -val;
                }
            }
            Eigen::FullPivLU<CMatrix> lu(m);
            if (!lu.isInvertible()) {
                throw NumericalError("committed measurement record has vanishing probability");
            }
            ainv_.topLeftCorner(d, d) = lu.inverse();
        }
        dim_ = d;
    }

    // Conditional probabilities of extending the prefix with bit 1 / 0 at
    // measured mode j.
    std::pair<double, double> bit_probabilities(uint32_t mode_j) {
        const StringOp op_t{StringOp::Kind::dressed_ann, static_cast<uint32_t>(stage_), mode_j};
        const StringOp op_c{StringOp::Kind::dressed_cre, static_cast<uint32_t>(stage_), mode_j};
        b_t_ = coupling(op_t);
        b_c_ = coupling(op_c);

        const Complex gamma0 = kernel_.contract(op_t, op_c);  // (T H T^dag)_{jj}
        const Complex gamma1 = kernel_.contract(op_c, op_t);  // (T* H T^T)_{jj}

        Complex q = 0.0;
        if (dim_ > 0) {
            w_ = ainv_.topLeftCorner(dim_, dim_) * b_t_;
            q = (b_c_.transpose() * w_)(0, 0);  // bilinear, no conjugation
        }
        const Complex sigma1 = gamma1 + q;
        const Complex sigma0 = gamma0 - q;
        if (std::abs(sigma0.imag()) > 1e-6 || std::abs(sigma1.imag()) > 1e-6) {
            throw NumericalError("bit conditional has imaginary residue");
        }
        if (std::abs(sigma0.real() + sigma1.real() - 1.0) > 1e-6) {
            throw NumericalError("bit conditionals do not sum to 1");
        }
        sigma0_ = sigma0.real();
        sigma1_ = sigma1.real();
        pending_mode_ = mode_j;
        return {clamp_probability(sigma1_, "bit conditional"),
                clamp_probability(sigma0_, "bit conditional")};
    }

    void commit_bit(uint8_t bit) {
        const StringOp op_t{StringOp::Kind::dressed_ann, static_cast<uint32_t>(stage_), pending_mode_};
        const StringOp op_c{StringOp::Kind::dressed_cre, static_cast<uint32_t>(stage_), pending_mode_};
        const double sigma = bit ? sigma1_ : sigma0_;
        if (std::abs(sigma) < 1e-300) {
            throw NumericalError("sampled a zero-probability branch");
        }
        // Appended pair in string order: bit 0 -> (a, a^dag), bit 1 reversed.
        const StringOp first = bit ? op_c : op_t;
        const StringOp second = bit ? op_t : op_c;
        const CVector b_first = bit ? b_c_ : b_t_;
        const CVector b_second = bit ? b_t_ : b_c_;

        const Eigen::Index d = dim_;
        CVector e1 = CVector::Zero(d);
        CVector e2 = CVector::Zero(d);
        if (d > 0) {
            e1 = ainv_.topLeftCorner(d, d) * b_first;
            e2 = ainv_.topLeftCorner(d, d) * b_second;
            // Block inverse update: A^-1 += (e2 e1^T - e1 e2^T)/sigma.
            ainv_.topLeftCorner(d, d) += (e2 * e1.transpose() - e1 * e2.transpose()) / sigma;
            ainv_.block(0, d, d, 1) = -e2 / sigma;
            ainv_.block(0, d + 1, d, 1) = e1 / sigma;
            ainv_.block(d, 0, 1, d) = e2.transpose() / sigma;
            ainv_.block(d + 1, 0, 1, d) = -e1.transpose() / sigma;
        }
        ainv_(d, d) = 0.0;
        ainv_(d + 1, d + 1) = 0.0;
        ainv_(d, d + 1) = Complex(-1.0 / sigma, 0.0);
        ainv_(d + 1, d) = Complex(1.0 / sigma, 0.0);

        ops_.push_back({first, OrderZone::center, next_center_++});
        ops_.push_back({second, OrderZone::center, next_center_++});
        dim_ += 2;
    }

  private:
    enum class OrderZone : uint8_t { before = 0, center = 1, after = 2 };
    struct OrderedOp {
        StringOp op;
        OrderZone zone;
        size_t sub;
    };

    // Signed matrix entries against a new center operator: the entry sign
    // follows string order, which differs from append order for the
    // mirrored/ket operators that sit after the insertion point.
    CVector coupling(const StringOp& new_op) const {
        CVector b(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) {
            const OrderedOp& o = ops_[static_cast<size_t>(i)];
            const bool existing_first =
                o.zone == OrderZone::before || (o.zone == OrderZone::center);
            b(i) = existing_first ? kernel_.contract(o.op, new_op) : -kernel_.contract(new_op, o.op);
        }
        return b;
    }

    ContractionKernel kernel_;
    std::vector<OrderedOp> ops_;
    CMatrix ainv_;
    Eigen::Index dim_ = 0;
    size_t stage_ = 0;
    size_t next_center_ = 0;
    uint32_t pending_mode_ = 0;
    double sigma0_ = 0, sigma1_ = 0;
    CVector b_t_, b_c_, w_;
};

SampledOutcome sample_incremental(const std::vector<CMatrix>& t_chain, const FockState& x,
                                  const std::vector<OutcomeAssignment>& prior,
                                  const ModeSubset& subset, Rng& rng) {
    IncrementalSampler sampler(t_chain, x, prior, subset.size());
    SampledOutcome out;
    out.conditional_probability = 1.0;
    for (size_t mode : subset.modes()) {
        const auto [p1, p0] = sampler.bit_probabilities(static_cast<uint32_t>(mode));
        const uint8_t bit = rng.uniform01() < p1 ? 1 : 0;
        const double cond = bit ? p1 : p0;
        sampler.commit_bit(bit);
        out.bits.push_back(bit);
        out.bit_conditionals.push_back(cond);
        out.conditional_probability *= cond;
    }
    return out;
}

struct StageSelection {
    std::vector<GateSpec> gates;
    ModeSubset subset;
};

StageSelection select_stage(const AdaptiveProgram& program, size_t s, const MeasurementRecord& record) {
    const auto& stage = program.stage(s);
    StageSelection sel{stage.segment(record), stage.subset(record)};
    if (sel.subset.n() != program.num_modes()) {
        throw ValidationError("stage subset has the wrong mode count");
    }
    check_gates_unmeasured(sel.gates, program.num_modes(), record, s);
    check_subset_unmeasured(sel.subset, record);
    return sel;
}

}  // namespace

std::vector<OutcomeAssignment> MeasurementRecord::assignments() const {
    std::vector<OutcomeAssignment> out;
    out.reserve(stages.size());
    for (const auto& s : stages) out.push_back(s.outcome);
    return out;
}

std::string MeasurementRecord::outcomes_string() const {
    std::string s;
    for (size_t i = 0; i < stages.size(); ++i) {
        if (i > 0) s += '|';
        s += stages[i].outcome.bits_string();
    }
    return s;
}

std::string MeasurementRecord::outcome_key() const {
    std::string s;
    for (const auto& st : stages) s += st.outcome.bits_string();
    return s;
}

bool MeasurementRecord::measured(size_t mode) const {
    for (const auto& s : stages) {
        if (s.outcome.subset().contains(mode)) return true;
    }
    return false;
}

AdaptiveProgram::AdaptiveProgram(size_t n, std::vector<Stage> stages)
    : n_(n), stages_(std::move(stages)) {
    if (n_ == 0) throw ValidationError("program needs at least one mode");
    for (const auto& s : stages_) {
        if (!s.segment || !s.subset) throw ValidationError("program stage selectors must be set");
    }
}

AdaptiveProgram::Stage AdaptiveProgram::fixed_stage(std::vector<GateSpec> gates, ModeSubset subset) {
    return Stage{
        [gates = std::move(gates)](const MeasurementRecord&) { return gates; },
        [subset = std::move(subset)](const MeasurementRecord&) { return subset; },
    };
}

SampledOutcome sample_subset_outcome(const std::vector<CMatrix>& t_chain, const FockState& x,
                                     const std::vector<OutcomeAssignment>& prior,
                                     const ModeSubset& subset, Rng& rng, SamplerMode mode) {
    if (t_chain.size() != prior.size() + 1) {
        throw ValidationError("T chain must cover every prior stage plus the current one");
    }
    for (const auto& y : prior) {
        for (size_t m : subset.modes()) {
            if (y.subset().contains(m)) {
                throw ValidationError("subset overlaps a previously measured mode");
            }
        }
    }
    if (subset.size() == 0) return SampledOutcome{};

    if (mode == SamplerMode::automatic) {
        Eigen::Index final_dim = static_cast<Eigen::Index>(2 * x.hamming_weight()) +
                                 2 * static_cast<Eigen::Index>(subset.size());
        for (const auto& y : prior) final_dim += 4 * static_cast<Eigen::Index>(y.size());
        mode = final_dim > kIncrementalThreshold ? SamplerMode::incremental : SamplerMode::reference;
    }
    return mode == SamplerMode::incremental ? sample_incremental(t_chain, x, prior, subset, rng)
                                            : sample_reference(t_chain, x, prior, subset, rng);
}

MeasurementRecord run_adaptive(const AdaptiveProgram& program, const FockState& x, uint64_t seed,
                               SamplerMode mode) {
    if (x.num_modes() != program.num_modes()) throw ValidationError("mode count mismatch");
    Rng rng(seed);
    MeasurementRecord record;
    record.seed = seed;

    const auto two_n = static_cast<Eigen::Index>(2 * program.num_modes());
    RMatrix r_cum = RMatrix::Identity(two_n, two_n);
    std::vector<CMatrix> t_chain;
    double joint = 1.0;

    for (size_t s = 0; s < program.num_stages(); ++s) {
        const StageSelection sel = select_stage(program, s, record);
        for (const auto& g : sel.gates) apply_gate_rotation(r_cum, g);
        if (orthogonality_defect(r_cum) > 1e-8) {
            throw NumericalError("cumulative rotation drifted from orthogonality");
        }
        t_chain.push_back(t_matrix_from_r(r_cum));

        const SampledOutcome sampled =
            sample_subset_outcome(t_chain, x, record.assignments(), sel.subset, rng, mode);
        joint *= sampled.conditional_probability;
        record.stages.push_back(StageResult{
            OutcomeAssignment(sel.subset, sampled.bits),
            sampled.conditional_probability,
            joint,
        });
    }
    return record;
}

namespace {

// Replays selectors against a fixed record, returning the cumulative T
// chain, and validating that the record matches the program.
std::vector<CMatrix> replay_t_chain(const AdaptiveProgram& program, const FockState& x,
                                    const MeasurementRecord& record) {
    if (x.num_modes() != program.num_modes()) throw ValidationError("mode count mismatch");
    if (record.stages.size() != program.num_stages()) {
        throw ValidationError("record stage count does not match the program");
    }
    const auto two_n = static_cast<Eigen::Index>(2 * program.num_modes());
    RMatrix r_cum = RMatrix::Identity(two_n, two_n);
    std::vector<CMatrix> t_chain;
    MeasurementRecord prefix;
    for (size_t s = 0; s < program.num_stages(); ++s) {
        const StageSelection sel = select_stage(program, s, prefix);
        if (!(sel.subset == record.stages[s].outcome.subset())) {
            std::ostringstream msg;
            msg << "record stage " << s + 1 << " subset does not match the program's selector";
            throw ValidationError(msg.str());
        }
        for (const auto& g : sel.gates) apply_gate_rotation(r_cum, g);
        t_chain.push_back(t_matrix_from_r(r_cum));
        prefix.stages.push_back(record.stages[s]);
    }
    return t_chain;
}

void enumerate_rec(const AdaptiveProgram& program, const FockState& x, RMatrix r_cum,
                   std::vector<CMatrix> t_chain, const MeasurementRecord& prefix,
                   std::vector<MeasurementRecord>& out) {
    const size_t s = prefix.stages.size();
    if (s == program.num_stages()) {
        out.push_back(prefix);
        if (out.size() > (1u << 20)) {
            throw ValidationError("record enumeration exceeds 2^20 outcomes");
        }
        return;
    }
    const StageSelection sel = select_stage(program, s, prefix);
    for (const auto& g : sel.gates) apply_gate_rotation(r_cum, g);
    t_chain.push_back(t_matrix_from_r(r_cum));

    const double prev_joint = prefix.joint_probability();
    const size_t k = sel.subset.size();
    for (uint64_t word = 0; word < (uint64_t{1} << k); ++word) {
        std::vector<uint8_t> bits(k);
        for (size_t b = 0; b < k; ++b) bits[b] = static_cast<uint8_t>((word >> (k - 1 - b)) & 1u);
        std::vector<OutcomeAssignment> stages = prefix.assignments();
        stages.emplace_back(sel.subset, bits);
        const double joint = joint_probability(t_chain, x, stages);
        // Prefixes below the degeneracy threshold are treated as impossible;
        // ratios against them are pure noise.
        const double cond = prev_joint >= kDegenerateTol
                                ? std::min(1.0, std::max(0.0, joint / prev_joint))
                                : 0.0;
        MeasurementRecord next = prefix;
        next.stages.push_back(StageResult{OutcomeAssignment(sel.subset, bits), cond, joint});
        enumerate_rec(program, x, r_cum, t_chain, next, out);
    }
}

}  // namespace

double exact_record_probability(const AdaptiveProgram& program, const FockState& x,
                                const MeasurementRecord& record) {
    const std::vector<CMatrix> t_chain = replay_t_chain(program, x, record);
    return joint_probability(t_chain, x, record.assignments());
}

std::vector<MeasurementRecord> enumerate_records(const AdaptiveProgram& program, const FockState& x) {
    if (x.num_modes() != program.num_modes()) throw ValidationError("mode count mismatch");
    std::vector<MeasurementRecord> out;
    const auto two_n = static_cast<Eigen::Index>(2 * program.num_modes());
    enumerate_rec(program, x, RMatrix::Identity(two_n, two_n), {}, MeasurementRecord{}, out);
    return out;
}

double oracle_record_probability(const AdaptiveProgram& program, const FockState& x,
                                 const MeasurementRecord& record) {
    if (x.num_modes() != program.num_modes()) throw ValidationError("mode count mismatch");
    if (record.stages.size() != program.num_stages()) {
        throw ValidationError("record stage count does not match the program");
    }
    StateVector state = StateVector::basis(x);
    MeasurementRecord prefix;
    double joint = 1.0;
    for (size_t s = 0; s < program.num_stages(); ++s) {
        const StageSelection sel = select_stage(program, s, prefix);
        if (!(sel.subset == record.stages[s].outcome.subset())) {
            throw ValidationError("record subset does not match the program's selector");
        }
        for (const auto& g : sel.gates) state.apply_gate(g);
        const double mass = state.project(record.stages[s].outcome);
        joint *= mass;
        if (joint < 1e-300) return 0.0;
        state.renormalize(mass);
        prefix.stages.push_back(record.stages[s]);
    }
    return joint;
}

MeasurementRecord oracle_sample_record(const AdaptiveProgram& program, const FockState& x,
                                       uint64_t seed) {
    if (x.num_modes() != program.num_modes()) throw ValidationError("mode count mismatch");
    Rng rng(seed);
    StateVector state = StateVector::basis(x);
    MeasurementRecord record;
    record.seed = seed;
    double joint = 1.0;

    for (size_t s = 0; s < program.num_stages(); ++s) {
        const StageSelection sel = select_stage(program, s, record);
        for (const auto& g : sel.gates) state.apply_gate(g);

        const size_t k = sel.subset.size();
        std::vector<double> mass(uint64_t{1} << k, 0.0);
        for (uint64_t idx = 0; idx < state.dimension(); ++idx) {
            uint64_t word = 0;
            for (size_t b = 0; b < k; ++b) {
                const size_t mode = sel.subset.modes()[b];
                const uint64_t bit = (idx >> (x.num_modes() - 1 - mode)) & 1u;
                word = (word << 1) | bit;
            }
            mass[word] += std::norm(state.amplitude(idx));
        }
        // CDF inversion over outcome words in ascending order.
        const double u = rng.uniform01();
        double acc = 0.0;
        uint64_t chosen = (uint64_t{1} << k) - 1;
        for (uint64_t word = 0; word < mass.size(); ++word) {
            acc += mass[word];
            if (u < acc) {
                chosen = word;
                break;
            }
        }
        std::vector<uint8_t> bits(k);
        for (size_t b = 0; b < k; ++b) bits[b] = static_cast<uint8_t>((chosen >> (k - 1 - b)) & 1u);
        OutcomeAssignment outcome(sel.subset, bits);
        const double m = state.project(outcome);
        state.renormalize(m);
        joint *= m;
        record.stages.push_back(StageResult{std::move(outcome), m, joint});
    }
    return record;
}

}  // namespace fermisim
