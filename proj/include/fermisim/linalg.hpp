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

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace fermisim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

/// Absolute tolerance for structural matrix validation (antisymmetry,
/// Hermiticity). Inputs failing it are rejected, never silently repaired.
inline constexpr double kStructureTol = 1e-10;

bool all_finite(const CMatrix& a);
bool all_finite(const RMatrix& a);

/// max_ij |A + A^T|_ij, zero for antisymmetric matrices.
double antisymmetry_defect(const CMatrix& a);
double antisymmetry_defect(const RMatrix& a);

/// max_ij |A - A^dag|_ij.
double hermiticity_defect(const CMatrix& a);

/// max_ij |A^dag A - I|_ij.
double unitarity_defect(const CMatrix& a);

/// max_ij |A^T A - I|_ij.
double orthogonality_defect(const RMatrix& a);

/// Determinant by LU with partial pivoting. The empty matrix has
/// determinant 1.
Complex determinant(const CMatrix& a);

/// Pfaffian of an antisymmetric matrix by skew-symmetric LTL^T elimination
/// with partial pivoting (Parlett-Reid). Sign-preserving, O(m^3).
/// Odd dimension returns exactly 0; the empty matrix returns 1.
/// Throws ValidationError if A is not antisymmetric within tol.
Complex pfaffian(const CMatrix& a, double tol = kStructureTol);

/// exp(A) by scaling-and-squaring with Pade approximants.
CMatrix matrix_exponential(const CMatrix& a);
RMatrix matrix_exponential(const RMatrix& a);

/// Canonical form of a real antisymmetric matrix: an orthogonal W and
/// values eps such that W a W^T is 2x2 block diagonal with blocks
/// [[0, eps_j], [-eps_j, 0]]. The +/- eps_j are the eigenvalue pairs of
/// i*a.
struct SkewCanonical {
    RMatrix w;
    std::vector<double> eps;
};
SkewCanonical skew_canonical_form(const RMatrix& alpha, double tol = kStructureTol);

}  // namespace fermisim
