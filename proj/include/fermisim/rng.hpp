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
#include <random>

namespace fermisim {

/// Name recorded in measurement records so runs are replayable.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

/// Seedable deterministic generator. Uniform doubles are derived from the
/// raw 64-bit stream explicitly ((x >> 11) * 2^-53) rather than through
/// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// splitmix64 step, used to derive independent per-shot sub-seeds from
/// (seed, shot index).
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t derive_subseed(uint64_t seed, uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

}  // namespace fermisim
