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

#include <stdexcept>
#include <string>

namespace fermisim {

/// Base class for all fermisim errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (circuit documents, bitstrings).
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Structurally invalid data: shape mismatches, out-of-range modes,
/// symmetry violations, inconsistent programs.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Numerical-integrity failure: a quantity that must be a probability or a
/// unitary/orthogonal matrix drifted beyond the allowed residue. These are
/// loud by design; they usually indicate a sign or convention bug upstream.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Disagreement between an engine result and the brute-force oracle.
class OracleMismatchError : public Error {
  public:
    using Error::Error;
};

/// Reaching a code path that the table construction rules out ('X' cells,
/// impossible operator orderings). Always a bug, never user error.
class InternalError : public Error {
  public:
    using Error::Error;
};

}  // namespace fermisim
