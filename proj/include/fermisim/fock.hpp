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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fermisim {

/// Occupation-number basis state of n fermionic modes. Bit index equals
/// mode index; textual bitstrings are written mode 0 first (leftmost).
/// This class owns every bit/mode/index convention in the project.
class FockState {
  public:
    explicit FockState(std::vector<uint8_t> bits);
    static FockState vacuum(size_t n);

    /// Parses an ASCII '0'/'1' string, mode 0 leftmost.
    static FockState from_string(std::string_view s);

    /// Statevector index convention: mode 0 is the most significant bit.
    static FockState from_index(uint64_t index, size_t n);
    uint64_t to_index() const;

    size_t num_modes() const { return bits_.size(); }
    bool occupied(size_t mode) const;
    size_t hamming_weight() const;
    int parity() const { return static_cast<int>(hamming_weight() % 2); }

    /// Occupied mode indices in ascending order.
    std::vector<size_t> occupied_modes() const;

    /// Jordan-Wigner string sign for applying a_i or a_i^dag at mode i:
    /// (-1)^(number of occupied modes below i).
    int jw_sign(size_t mode) const;

    std::string to_string() const;

    bool operator==(const FockState& other) const { return bits_ == other.bits_; }

  private:
    std::vector<uint8_t> bits_;
};

inline int parity(const FockState& x) {
    return x.parity();
}

inline int jw_sign(const FockState& x, size_t mode) {
    return x.jw_sign(mode);
}

/// Strictly increasing list of distinct mode indices in [0, n).
class ModeSubset {
  public:
    ModeSubset(size_t n, std::vector<size_t> modes);

    size_t n() const { return n_; }
    size_t size() const { return modes_.size(); }
    const std::vector<size_t>& modes() const { return modes_; }
    bool contains(size_t mode) const;

    bool operator==(const ModeSubset& other) const {
        return n_ == other.n_ && modes_ == other.modes_;
    }

  private:
    size_t n_;
    std::vector<size_t> modes_;
};

/// Measurement outcome y*: one bit per mode of a subset, aligned with the
/// subset's (ascending) mode order.
class OutcomeAssignment {
  public:
    OutcomeAssignment(ModeSubset subset, std::vector<uint8_t> bits);
    static OutcomeAssignment empty(size_t n);

    const ModeSubset& subset() const { return subset_; }
    const std::vector<uint8_t>& bits() const { return bits_; }
    size_t size() const { return bits_.size(); }

    /// True when the basis state agrees with every assigned bit.
    bool consistent_with(const FockState& x) const;

    std::string bits_string() const;

  private:
    ModeSubset subset_;
    std::vector<uint8_t> bits_;
};

}  // namespace fermisim
