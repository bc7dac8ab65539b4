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

#include "fermisim/fock.hpp"

#include <algorithm>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

FockState::FockState(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
    for (uint8_t b : bits_) {
        if (b != 0 && b != 1) throw ValidationError("occupation bits must be 0 or 1");
    }
}

FockState FockState::vacuum(size_t n) {
    return FockState(std::vector<uint8_t>(n, 0));
}

FockState FockState::from_string(std::string_view s) {
    std::vector<uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c == '0') {
            bits.push_back(0);
        } else if (c == '1') {
            bits.push_back(1);
        } else {
            std::ostringstream msg;
            msg << "invalid character '" << c << "' in occupation bitstring \"" << s << "\"";
            throw ValidationError(msg.str());
        }
    }
    return FockState(std::move(bits));
}

FockState FockState::from_index(uint64_t index, size_t n) {
    if (n > 63) throw ValidationError("index conversion supports at most 63 modes");
    if (index >> n != 0) throw ValidationError("basis index out of range for mode count");
    std::vector<uint8_t> bits(n, 0);
    for (size_t i = 0; i < n; ++i) {
        bits[i] = static_cast<uint8_t>((index >> (n - 1 - i)) & 1u);
    }
    return FockState(std::move(bits));
}

uint64_t FockState::to_index() const {
    const size_t n = bits_.size();
    if (n > 63) throw ValidationError("index conversion supports at most 63 modes");
    uint64_t index = 0;
    for (size_t i = 0; i < n; ++i) {
        index = (index << 1) | bits_[i];
    }
    return index;
}

bool FockState::occupied(size_t mode) const {
    if (mode >= bits_.size()) throw ValidationError("mode index out of range");
    return bits_[mode] != 0;
}

size_t FockState::hamming_weight() const {
    size_t w = 0;
    for (uint8_t b : bits_) w += b;
    return w;
}

std::vector<size_t> FockState::occupied_modes() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

int FockState::jw_sign(size_t mode) const {
    if (mode >= bits_.size()) throw ValidationError("mode index out of range");
    size_t below = 0;
    for (size_t i = 0; i < mode; ++i) below += bits_[i];
    return (below % 2 == 0) ? 1 : -1;
}

std::string FockState::to_string() const {
    std::string s(bits_.size(), '0');
    for (size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) s[i] = '1';
    }
    return s;
}

ModeSubset::ModeSubset(size_t n, std::vector<size_t> modes) : n_(n), modes_(std::move(modes)) {
    for (size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i] >= n_) {
            std::ostringstream msg;
            msg << "subset mode " << modes_[i] << " out of range for n=" << n_;
            throw ValidationError(msg.str());
        }
        if (i > 0 && modes_[i] <= modes_[i - 1]) {
            throw ValidationError("subset modes must be strictly increasing");
        }
    }
}

bool ModeSubset::contains(size_t mode) const {
    return std::binary_search(modes_.begin(), modes_.end(), mode);
}

OutcomeAssignment::OutcomeAssignment(ModeSubset subset, std::vector<uint8_t> bits)
    : subset_(std::move(subset)), bits_(std::move(bits)) {
    if (subset_.size() != bits_.size()) {
        throw ValidationError("outcome bit count does not match subset size");
    }
    for (uint8_t b : bits_) {
        if (b != 0 && b != 1) throw ValidationError("outcome bits must be 0 or 1");
    }
}

OutcomeAssignment OutcomeAssignment::empty(size_t n) {
    return OutcomeAssignment(ModeSubset(n, {}), {});
}

bool OutcomeAssignment::consistent_with(const FockState& x) const {
    for (size_t k = 0; k < bits_.size(); ++k) {
        if (x.occupied(subset_.modes()[k]) != (bits_[k] != 0)) return false;
    }
    return true;
}

std::string OutcomeAssignment::bits_string() const {
    std::string s(bits_.size(), '0');
    for (size_t k = 0; k < bits_.size(); ++k) {
        if (bits_[k]) s[k] = '1';
    }
    return s;
}

}  // namespace fermisim
