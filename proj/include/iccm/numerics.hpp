// SPDX-License-Identifier: Apache-2.0
//
// iccm - covariance-aided channel estimation for TDD/FDD massive MIMO arrays
// Copyright (C) 2026 The iccm authors
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

#ifndef ICCM_NUMERICS_HPP
#define ICCM_NUMERICS_HPP

#include <Eigen/Dense>
#include <lapacke.h>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace iccm
{

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = std::numbers::pi;

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when the input is valid in shape but carries no usable information.
class DegenerateInput : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

inline void require(bool condition, const std::string &message)
{
    if (!condition)
        throw ContractViolation(message);
}

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

inline bool all_finite(const CMatrix &a)
{
    return a.array().real().allFinite() && a.array().imag().allFinite();
}

// Relative Frobenius distance ||a - b|| / ||b||.
inline double relative_frobenius(const CMatrix &a, const CMatrix &b)
{
    const double nb = b.norm();
    return nb > 0.0 ? (a - b).norm() / nb : (a - b).norm();
}

// Hermitian defect ||H - H^H|| / ||H|| (0 for the zero matrix).
inline double hermitian_defect(const CMatrix &h)
{
    const double n = h.norm();
    if (n == 0.0)
        return 0.0;
    return (h - h.adjoint()).norm() / n;
}

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted non-increasing.
///
/// `vectors` may hold fewer columns than the matrix dimension when only the
/// leading part of the spectrum was requested; column i pairs with values(i).
struct EigenDecomposition
{
    RVector values;
    CMatrix vectors;

    Index count() const { return values.size(); }
    Index dimension() const { return vectors.rows(); }

    // V diag(lambda) V^H over the stored pairs.
    CMatrix reconstruct() const
    {
        return vectors * values.cast<cd>().asDiagonal() * vectors.adjoint();
    }
};

namespace detail
{

inline void check_hermitian(const CMatrix &h, double tol)
{
    require(h.rows() == h.cols(), "hermitian_eig: matrix must be square");
    require(h.rows() > 0, "hermitian_eig: matrix must be non-empty");
    require(all_finite(h), "hermitian_eig: non-finite entries");
    require(hermitian_defect(h) <= tol, "hermitian_eig: matrix is not Hermitian");
}

// LAPACK zheevr on the lower triangle, all eigenvalues; returns ascending values.
inline void zheevr_all(CMatrix &work, char jobz, RVector &w, CMatrix &z)
{
    const lapack_int n = static_cast<lapack_int>(work.rows());
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    w.resize(n);
    if (jobz == 'V')
        z.resize(n, n);
    cd dummy{};
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz, 'A', 'L', n,
                                           reinterpret_cast<lapack_complex_double *>(work.data()), n, 0.0, 0.0, 0,
                                           0, 0.0, &found,
                                           w.data(),
                                           reinterpret_cast<lapack_complex_double *>(jobz == 'V' ? z.data() : &dummy),
                                           n, isuppz.data());
    if (info != 0)
        throw std::runtime_error("hermitian_eig: LAPACK zheevr failed with info " + std::to_string(info));
}

// LAPACK zheevx for eigenpairs il..iu (1-based, ascending). Bisection plus
// inverse iteration reorthogonalizes clustered pairs, which the partial
// MRRR path does not always do for near-null clusters.
inline bool zheevx_range(CMatrix &work, lapack_int il, lapack_int iu, RVector &w, CMatrix &z)
{
    const lapack_int n = static_cast<lapack_int>(work.rows());
    lapack_int found = 0;
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    w.resize(n);
    z.resize(n, iu - il + 1);
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_zheevx(LAPACK_COL_MAJOR, 'V', 'I', 'L', n,
                                           reinterpret_cast<lapack_complex_double *>(work.data()), n, 0.0, 0.0, il,
                                           iu, abstol, &found, w.data(),
                                           reinterpret_cast<lapack_complex_double *>(z.data()), n, ifail.data());
    if (info < 0)
        throw std::runtime_error("hermitian_eig: LAPACK zheevx failed with info " + std::to_string(info));
    w.conservativeResize(found);
    return info == 0; // info > 0: some vectors did not converge
}

} // namespace detail

/// Leading `leading` eigenpairs of a Hermitian matrix (all when leading <= 0
/// or >= dimension). Input is symmetrized before factorization.
inline EigenDecomposition hermitian_eig(const CMatrix &h, Index leading = 0, double hermitian_tol = 1e-9)
{
    detail::check_hermitian(h, hermitian_tol);
    const Index n = h.rows();
    if (leading <= 0 || leading > n)
        leading = n;

    CMatrix work = 0.5 * (h + h.adjoint());
    RVector w;
    CMatrix z;
    bool partial = leading < n;
    if (partial)
    {
        CMatrix scratch = work;
        const bool converged = detail::zheevx_range(scratch, static_cast<lapack_int>(n - leading + 1),
                                                    static_cast<lapack_int>(n), w, z);
        // Bisection can miscount a tight cluster near zero; fall back to the
        // full spectrum whenever the partial result is short or not orthonormal.
        partial = converged && w.size() == leading &&
                  (z.adjoint() * z - CMatrix::Identity(leading, leading)).norm() <= 1e-10;
    }
    if (!partial)
    {
        detail::zheevr_all(work, 'V', w, z);
        if (w.size() != n)
            throw std::runtime_error("hermitian_eig: LAPACK returned " + std::to_string(w.size()) + " of " +
                                     std::to_string(n) + " eigenvalues");
        w = w.tail(leading).eval();
        z = z.rightCols(leading).eval();
    }
    EigenDecomposition out;
    const Index k = w.size();
    out.values.resize(k);
    out.vectors.resize(n, k);
    for (Index i = 0; i < k; ++i)
    {
        out.values(i) = w(k - 1 - i);
        out.vectors.col(i) = z.col(k - 1 - i);
    }
    return out;
}

/// All eigenvalues of a Hermitian matrix, non-increasing.
inline RVector hermitian_eigenvalues(const CMatrix &h, double hermitian_tol = 1e-9)
{
    detail::check_hermitian(h, hermitian_tol);
    CMatrix work = 0.5 * (h + h.adjoint());
    RVector w;
    CMatrix z;
    detail::zheevr_all(work, 'N', w, z);
    return w.reverse();
}

/// Moore-Penrose pseudo-inverse. Singular values below tol * sigma_max are
/// treated as zero.
inline CMatrix pseudo_inverse(const CMatrix &a, double tol = 1e-10)
{
    require(all_finite(a), "pseudo_inverse: non-finite entries");
    require(tol > 0.0 && tol < 1.0, "pseudo_inverse: tol must lie in (0,1)");
    if (a.size() == 0)
        return CMatrix(a.cols(), a.rows());

    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector &s = svd.singularValues();
    const double cutoff = s.size() > 0 ? tol * s(0) : 0.0;
    RVector inv = RVector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff)
            inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.cast<cd>().asDiagonal() * svd.matrixU().adjoint();
}

/// Normalized DFT matrix, [F]_{p,q} = exp(-j 2 pi p q / M) / sqrt(M).
inline CMatrix dft_matrix(Index m)
{
    require(m >= 1, "dft_matrix: size must be at least 1");
    CMatrix f(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Index p = 0; p < m; ++p)
        for (Index q = 0; q < m; ++q)
        {
            // reduce p*q mod M first so large sizes keep full phase accuracy
            const double phase = -2.0 * pi * static_cast<double>((p * q) % m) / static_cast<double>(m);
            f(p, q) = std::polar(scale, phase);
        }
    return f;
}

/// F v computed by FFT, with F the normalized DFT matrix.
inline CVector unitary_dft(const CVector &v)
{
    require(v.size() >= 1, "unitary_dft: empty input");
    if (v.size() == 1) // kissfft does not handle length 1
        return v;
    thread_local Eigen::FFT<double> fft;
    CVector out(v.size());
    fft.fwd(out, v);
    return out / std::sqrt(static_cast<double>(v.size()));
}

/// F^H v computed by FFT.
inline CVector unitary_idft(const CVector &v)
{
    require(v.size() >= 1, "unitary_idft: empty input");
    if (v.size() == 1) // kissfft does not handle length 1
        return v;
    thread_local Eigen::FFT<double> fft;
    CVector out(v.size());
    fft.inv(out, v);
    return out * std::sqrt(static_cast<double>(v.size()));
}

} // namespace iccm

#endif
