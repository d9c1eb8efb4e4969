// SPDX-License-Identifier: Apache-2.0
//
// relayopt - robust transceiver design for multi-hop AF MIMO relay chains
// Copyright (C) 2026 The relayopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Dense complex linear algebra with fixed ordering and phase conventions.
//
// Decompositions are delegated to Eigen. What this header adds on top:
//  - singular values and eigenvalues are always returned in non-increasing order,
//  - every column of U has its largest-magnitude entry made real and positive
//    (ties resolved towards the lowest row index), and the matching column of V
//    is rotated by the same phase so the factorization still reconstructs,
//  - PSD square roots clip tiny negative eigenvalues instead of failing.
// Together these make every downstream design bit-reproducible.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "errors.hpp"
#include "random.hpp"

namespace relayopt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdClip = 1e-12;
inline constexpr double kInvertFloor = 1e-12;

struct OrderedSVD {
    ComplexMatrix u;
    RealVector singular_values;
    ComplexMatrix v;
};

struct OrderedEig {
    ComplexMatrix u;
    RealVector eigenvalues;
};

namespace detail {

inline double max_abs(const ComplexMatrix& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Eigenvalue threshold scaled to the matrix magnitude.
inline double scaled_floor(double floor, const RealVector& eigenvalues)
{
    const double scale = eigenvalues.size() == 0 ? 1.0 : eigenvalues.cwiseAbs().maxCoeff();
    return floor * std::max(1.0, scale);
}

/// Index of the largest-magnitude entry, first one wins on exact ties.
inline Index dominant_row(const auto& column)
{
    Index best = 0;
    double best_mag = -1.0;
    for (Index i = 0; i < column.size(); ++i) {
        const double mag = std::abs(column(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    return best;
}

inline Complex unit_phase_of(Complex z)
{
    const double mag = std::abs(z);
    return mag > 0.0 ? z / mag : Complex{1.0, 0.0};
}

inline bool non_increasing(const RealVector& x)
{
    for (Index i = 0; i + 1 < x.size(); ++i)
        if (x(i) < x(i + 1))
            return false;
    return true;
}

} // namespace detail

inline void require_finite(const ComplexMatrix& a, std::string_view what)
{
    if (a.rows() < 1 || a.cols() < 1)
        throw ValidationError(std::string(what) + ": empty matrix");
    if (!a.allFinite())
        throw ValidationError(std::string(what) + ": non-finite entry");
}

inline void require_square(const ComplexMatrix& a, std::string_view what)
{
    if (a.rows() != a.cols()) {
        std::ostringstream os;
        os << what << ": expected square matrix, got " << a.rows() << "x" << a.cols();
        throw ValidationError(os.str());
    }
}

inline void require_shape(const ComplexMatrix& a, Index rows, Index cols, std::string_view what)
{
    if (a.rows() != rows || a.cols() != cols) {
        std::ostringstream os;
        os << what << ": expected " << rows << "x" << cols << ", got " << a.rows() << "x" << a.cols();
        throw ValidationError(os.str());
    }
}

/// Hermitian within `tol`, relative to max(1, largest entry magnitude).
inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol)
{
    if (a.rows() != a.cols())
        return false;
    const double scale = std::max(1.0, detail::max_abs(a));
    return detail::max_abs(a - a.adjoint()) <= tol * scale;
}

inline void require_hermitian(const ComplexMatrix& a, std::string_view what)
{
    require_finite(a, what);
    require_square(a, what);
    if (!is_hermitian(a))
        throw ValidationError(std::string(what) + ": matrix is not Hermitian");
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a)
{
    return (a + a.adjoint()) * 0.5;
}

inline ComplexMatrix identity(Index n)
{
    return ComplexMatrix::Identity(n, n);
}

inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b)
{
    // Tr(A B) without forming the product.
    return (a.transpose().cwiseProduct(b)).sum();
}

inline OrderedEig ordered_eig_hermitian(const ComplexMatrix& a)
{
    require_hermitian(a, "ordered_eig_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success)
        throw NumericalError("ordered_eig_hermitian: eigensolver did not converge");

    const Index n = a.rows();
    OrderedEig out{ComplexMatrix(n, n), RealVector(n)};
    // Eigen returns ascending eigenvalues. Reverse the order of tie groups but
    // not the order inside a group, so a diagonal input keeps its basis.
    const RealVector& asc = solver.eigenvalues();
    const double tie = 1e-13 * std::max(1.0, asc.cwiseAbs().maxCoeff());
    Index dst = 0;
    for (Index hi = n; hi > 0;) {
        Index lo = hi - 1;
        while (lo > 0 && asc(hi - 1) - asc(lo - 1) <= tie)
            --lo;
        for (Index src = lo; src < hi; ++src, ++dst) {
            out.eigenvalues(dst) = asc(hi - 1 - (src - lo));
            out.u.col(dst) = solver.eigenvectors().col(src);
        }
        hi = lo;
    }
    for (Index j = 0; j < n; ++j) {
        const Complex phase = detail::unit_phase_of(out.u(detail::dominant_row(out.u.col(j)), j));
        out.u.col(j) *= std::conj(phase);
    }
    assert(detail::non_increasing(out.eigenvalues));
    return out;
}

inline OrderedSVD ordered_svd(const ComplexMatrix& a)
{
    require_finite(a, "ordered_svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);

    OrderedSVD out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    const Index r = out.singular_values.size();

    // JacobiSVD already sorts; a stable insertion pass keeps the guarantee explicit.
    for (Index i = 1; i < r; ++i) {
        for (Index j = i; j > 0 && out.singular_values(j - 1) < out.singular_values(j); --j) {
            std::swap(out.singular_values(j - 1), out.singular_values(j));
            out.u.col(j - 1).swap(out.u.col(j));
            out.v.col(j - 1).swap(out.v.col(j));
        }
    }

    for (Index j = 0; j < out.u.cols(); ++j) {
        const Complex phase = detail::unit_phase_of(out.u(detail::dominant_row(out.u.col(j)), j));
        out.u.col(j) *= std::conj(phase);
        if (j < r)
            out.v.col(j) *= std::conj(phase);
    }
    // Columns of V without a partner in U follow their own convention.
    for (Index j = r; j < out.v.cols(); ++j) {
        const Complex phase = detail::unit_phase_of(out.v(detail::dominant_row(out.v.col(j)), j));
        out.v.col(j) *= std::conj(phase);
    }
    assert(detail::non_increasing(out.singular_values));
    return out;
}

/// Rebuild U diag(s) V^H from a (possibly rectangular) ordered SVD.
inline ComplexMatrix reconstruct(const OrderedSVD& svd)
{
    const Index r = svd.singular_values.size();
    return svd.u.leftCols(r) * svd.singular_values.cast<Complex>().asDiagonal() * svd.v.leftCols(r).adjoint();
}

inline ComplexMatrix reconstruct(const OrderedEig& eig)
{
    return eig.u * eig.eigenvalues.cast<Complex>().asDiagonal() * eig.u.adjoint();
}

/// Hermitian PSD square root S with S S = A.
inline ComplexMatrix hermitian_sqrt(const ComplexMatrix& a)
{
    const OrderedEig eig = ordered_eig_hermitian(a);
    const Index n = eig.eigenvalues.size();
    const double floor = detail::scaled_floor(kPsdClip, eig.eigenvalues);
    const double smallest = eig.eigenvalues(n - 1);
    if (smallest < -floor) {
        std::ostringstream os;
        os << "hermitian_sqrt: matrix is not PSD (smallest eigenvalue " << smallest << ")";
        throw NotPsdError(os.str(), smallest);
    }
    RealVector root(n);
    for (Index i = 0; i < n; ++i)
        root(i) = std::sqrt(std::max(eig.eigenvalues(i), 0.0));
    return hermitian_part(eig.u * root.cast<Complex>().asDiagonal() * eig.u.adjoint());
}

/// Hermitian PD inverse square root T with T A T = I.
inline ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix& a)
{
    const OrderedEig eig = ordered_eig_hermitian(a);
    const Index n = eig.eigenvalues.size();
    const double smallest = eig.eigenvalues(n - 1);
    if (!(smallest > detail::scaled_floor(kInvertFloor, eig.eigenvalues))) {
        std::ostringstream os;
        os << "hermitian_inv_sqrt: matrix is not safely positive definite (smallest eigenvalue "
           << smallest << ")";
        throw ConditioningError(os.str(), smallest);
    }
    RealVector root(n);
    for (Index i = 0; i < n; ++i)
        root(i) = 1.0 / std::sqrt(eig.eigenvalues(i));
    return hermitian_part(eig.u * root.cast<Complex>().asDiagonal() * eig.u.adjoint());
}

/// Inverse of a Hermitian PD matrix via Cholesky.
inline ComplexMatrix hermitian_pd_inverse(const ComplexMatrix& a, std::string_view what)
{
    require_hermitian(a, what);
    Eigen::LLT<ComplexMatrix> llt(hermitian_part(a));
    if (llt.info() != Eigen::Success) {
        const double smallest = ordered_eig_hermitian(a).eigenvalues.minCoeff();
        std::ostringstream os;
        os << what << ": matrix is not positive definite (smallest eigenvalue " << smallest << ")";
        throw ConditioningError(os.str(), smallest);
    }
    return hermitian_part(llt.solve(identity(a.rows())));
}

/// Unitary DFT matrix, Q[m, l] = exp(-i 2 pi m l / n) / sqrt(n).
inline ComplexMatrix dft_matrix(Index n)
{
    if (n < 1)
        throw ValidationError("dft_matrix: size must be at least 1");
    ComplexMatrix q(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index m = 0; m < n; ++m) {
        for (Index l = 0; l < n; ++l) {
            // Reduce m*l mod n first so the angle stays exact for large products.
            const auto k = static_cast<double>((m * l) % n);
            const double angle = -2.0 * std::numbers::pi * k / static_cast<double>(n);
            q(m, l) = std::polar(scale, angle);
        }
    }
    return q;
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with R's diagonal made positive.
inline ComplexMatrix random_unitary(Index n, Rng& rng)
{
    if (n < 1)
        throw ValidationError("random_unitary: size must be at least 1");
    ComplexMatrix g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            g(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * identity(n);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        q.col(j) *= detail::unit_phase_of(r(j, j));
    return q;
}

/// Returns row_cov^{1/2} H_W col_cov^{1/2}, H_W with i.i.d. CN(0, 1) entries.
/// The row-major vectorization of the result has covariance row_cov (x) col_cov^T.
inline ComplexMatrix sample_kronecker_gaussian(Index m, Index n, const ComplexMatrix& row_cov,
                                               const ComplexMatrix& col_cov, Rng& rng)
{
    require_shape(row_cov, m, m, "sample_kronecker_gaussian: row covariance");
    require_shape(col_cov, n, n, "sample_kronecker_gaussian: column covariance");
    ComplexMatrix white(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            white(i, j) = rng.complex_normal();
    return hermitian_sqrt(row_cov) * white * hermitian_sqrt(col_cov);
}

} // namespace relayopt
