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

#include "fermisim/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermisim/errors.hpp"

namespace fermisim {

bool all_finite(const CMatrix& a) {
    return a.allFinite();
}

bool all_finite(const RMatrix& a) {
    return a.allFinite();
}

double antisymmetry_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("antisymmetry check requires a square matrix");
    if (a.rows() == 0) return 0.0;
    return (a + a.transpose()).cwiseAbs().maxCoeff();
}

double antisymmetry_defect(const RMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("antisymmetry check requires a square matrix");
    if (a.rows() == 0) return 0.0;
    return (a + a.transpose()).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("hermiticity check requires a square matrix");
    if (a.rows() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("unitarity check requires a square matrix");
    if (a.rows() == 0) return 0.0;
    CMatrix g = a.adjoint() * a;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

double orthogonality_defect(const RMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("orthogonality check requires a square matrix");
    if (a.rows() == 0) return 0.0;
    RMatrix g = a.transpose() * a;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

Complex determinant(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        std::ostringstream msg;
        msg << "determinant requires a square matrix, got " << a.rows() << "x" << a.cols();
        throw ValidationError(msg.str());
    }
    if (a.rows() == 0) return Complex(1.0, 0.0);
    return Eigen::PartialPivLU<CMatrix>(a).determinant();
}

Complex pfaffian(const CMatrix& a, double tol) {
    const Eigen::Index m = a.rows();
    if (m != a.cols()) throw ValidationError("pfaffian requires a square matrix");
    if (!all_finite(a)) throw ValidationError("pfaffian requires finite entries");
    if (m > 0 && antisymmetry_defect(a) > tol) {
        std::ostringstream msg;
        msg << "pfaffian input is not antisymmetric (defect " << antisymmetry_defect(a) << " > " << tol << ")";
        throw ValidationError(msg.str());
    }
    if (m == 0) return Complex(1.0, 0.0);
    if (m % 2 == 1) return Complex(0.0, 0.0);

    CMatrix w = a;
    Complex pf(1.0, 0.0);
    for (Eigen::Index k = 0; k + 1 < m; k += 2) {
        // Pivot: bring the largest entry of column k below the diagonal
        // into position (k+1, k). Row/column swaps flip the sign.
        Eigen::Index p = k + 1;
        double best = std::abs(w(k + 1, k));
        for (Eigen::Index r = k + 2; r < m; ++r) {
            const double mag = std::abs(w(r, k));
            if (mag > best) {
                best = mag;
                p = r;
            }
        }
        if (best == 0.0) return Complex(0.0, 0.0);
        if (p != k + 1) {
            w.row(k + 1).swap(w.row(p));
            w.col(k + 1).swap(w.col(p));
            pf = -pf;
        }

        const Complex pivot = w(k + 1, k);
        pf *= w(k, k + 1);

        const Eigen::Index t = m - (k + 2);
        if (t > 0) {
            // Congruence update eliminating column k below row k+1:
            // rank-2 skew update of the trailing block.
            CVector mu = w.block(k + 2, k, t, 1) / pivot;
            CVector row = w.block(k + 1, k + 2, 1, t).transpose();
            w.block(k + 2, k + 2, t, t).noalias() -= mu * row.transpose();
            w.block(k + 2, k + 2, t, t).noalias() += row * mu.transpose();
        }
    }
    return pf;
}

CMatrix matrix_exponential(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("matrix exponential requires a square matrix");
    if (!all_finite(a)) throw ValidationError("matrix exponential requires finite entries");
    if (a.rows() == 0) return CMatrix(0, 0);
    return a.exp();
}

RMatrix matrix_exponential(const RMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("matrix exponential requires a square matrix");
    if (!all_finite(a)) throw ValidationError("matrix exponential requires finite entries");
    if (a.rows() == 0) return RMatrix(0, 0);
    return a.exp();
}

SkewCanonical skew_canonical_form(const RMatrix& alpha, double tol) {
    const Eigen::Index m = alpha.rows();
    if (m != alpha.cols()) throw ValidationError("skew canonical form requires a square matrix");
    if (m % 2 != 0) throw ValidationError("skew canonical form requires even dimension");
    if (!all_finite(alpha)) throw ValidationError("skew canonical form requires finite entries");
    if (m > 0 && antisymmetry_defect(alpha) > tol) {
        throw ValidationError("skew canonical form input is not antisymmetric");
    }
    if (m == 0) return SkewCanonical{RMatrix(0, 0), {}};

    // For a skew-symmetric (hence normal) matrix, the real Schur form is
    // block diagonal: 2x2 blocks [[0, eps], [-eps, 0]] plus 1x1 zeros.
    Eigen::RealSchur<RMatrix> schur(alpha);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("real Schur decomposition failed");
    }
    const RMatrix& t = schur.matrixT();
    const RMatrix& u = schur.matrixU();

    const double scale = std::max(1.0, alpha.cwiseAbs().maxCoeff());
    const double block_tol = 1e-12 * scale;

    std::vector<Eigen::Index> row_order;
    std::vector<double> eps;
    std::vector<Eigen::Index> zeros;
    row_order.reserve(static_cast<size_t>(m));

    Eigen::Index k = 0;
    while (k < m) {
        if (k + 1 < m && std::abs(t(k + 1, k)) > block_tol) {
            row_order.push_back(k);
            row_order.push_back(k + 1);
            eps.push_back(t(k, k + 1));
            k += 2;
        } else {
            zeros.push_back(k);
            k += 1;
        }
    }
    // Zero eigenvalues come in pairs; group leftover 1x1 blocks.
    for (size_t z = 0; z + 1 < zeros.size(); z += 2) {
        row_order.push_back(zeros[z]);
        row_order.push_back(zeros[z + 1]);
        eps.push_back(0.0);
    }
    if (zeros.size() % 2 != 0) {
        throw NumericalError("skew canonical form found an unpaired zero block");
    }

    RMatrix w(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        w.row(r) = u.col(row_order[static_cast<size_t>(r)]).transpose();
    }

    // alpha = U T U^T, so W = (reordered rows of) U^T satisfies
    // W alpha W^T = block diagonal.
    RMatrix d = RMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m / 2; ++j) {
        d(2 * j, 2 * j + 1) = eps[static_cast<size_t>(j)];
        d(2 * j + 1, 2 * j) = -eps[static_cast<size_t>(j)];
    }
    const double defect = (w * alpha * w.transpose() - d).cwiseAbs().maxCoeff();
    if (defect > 1e-9 * scale) {
        std::ostringstream msg;
        msg << "skew canonical form reconstruction defect " << defect << " exceeds tolerance";
        throw NumericalError(msg.str());
    }
    if (orthogonality_defect(w) > 1e-10) {
        throw NumericalError("skew canonical form produced a non-orthogonal W");
    }
    return SkewCanonical{std::move(w), std::move(eps)};
}

}  // namespace fermisim
