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

#ifndef ICCM_CCM_ESTIMATE_HPP
#define ICCM_CCM_ESTIMATE_HPP

#include "iccm/array_model.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string_view>

namespace iccm
{

enum class CcmMethod
{
    ic_pccm,
    cf_iccm,
    mc_iccm,
    true_quadrature,
    sample_average,
    beamspace, // diagonal in the rotated DFT basis, built from an SBEM estimate
};

inline std::string_view to_string(CcmMethod m)
{
    switch (m)
    {
    case CcmMethod::ic_pccm: return "IC-pCCM";
    case CcmMethod::cf_iccm: return "CF-iCCM";
    case CcmMethod::mc_iccm: return "MC-iCCM";
    case CcmMethod::true_quadrature: return "TrueQuadrature";
    case CcmMethod::sample_average: return "SampleAverage";
    case CcmMethod::beamspace: return "Beamspace";
    }
    return "?";
}

inline constexpr double default_rank_threshold = 1e-6;
inline constexpr double default_power_fraction = 0.99;

/// Channel covariance estimate: an immutable Hermitian PSD matrix with a
/// lazily computed, shared eigendecomposition. Copies share the cache, and
/// the cache is safe to fill from several threads.
class CcmEstimate
{
public:
    static constexpr double hermitian_tol = 1e-10;

    CcmEstimate(CMatrix matrix, Link link, CcmMethod method)
        : matrix_(std::move(matrix)), link_(link), method_(method), cache_(std::make_shared<Cache>())
    {
        require(matrix_.rows() == matrix_.cols() && matrix_.rows() > 0, "CcmEstimate: matrix must be square");
        require(all_finite(matrix_), "CcmEstimate: non-finite entries");
        require(hermitian_defect(matrix_) <= hermitian_tol, "CcmEstimate: matrix is not Hermitian");
    }

    const CMatrix &matrix() const { return matrix_; }
    Link link() const { return link_; }
    CcmMethod method() const { return method_; }
    Index dimension() const { return matrix_.rows(); }
    double trace() const { return matrix_.diagonal().real().sum(); }

    /// Leading eigenpairs; at least `leading` of them (all when leading <= 0).
    /// The returned decomposition may hold more pairs than requested.
    const EigenDecomposition &eig(Index leading = 0) const
    {
        const Index n = dimension();
        if (leading <= 0 || leading > n)
            leading = n;
        std::lock_guard lock(cache_->mutex);
        if (!cache_->eig || cache_->eig->count() < leading)
            cache_->eig = hermitian_eig(matrix_, leading, hermitian_tol);
        return *cache_->eig;
    }

    /// Full spectrum, non-increasing.
    const RVector &eigenvalues() const
    {
        std::lock_guard lock(cache_->mutex);
        if (!cache_->values)
        {
            if (cache_->eig && cache_->eig->count() == dimension())
                cache_->values = cache_->eig->values;
            else
                cache_->values = hermitian_eigenvalues(matrix_, hermitian_tol);
        }
        return *cache_->values;
    }

    /// Count of eigenvalues above threshold * lambda_max.
    Index numerical_rank(double threshold = default_rank_threshold) const
    {
        const RVector &v = eigenvalues();
        const double top = v(0);
        if (top <= 0.0)
            return 0;
        return (v.array() > threshold * top).count();
    }

    /// Smallest count of leading eigenvalues holding `fraction` of the trace.
    Index power_rank(double fraction = default_power_fraction) const
    {
        const RVector &v = eigenvalues();
        const double total = v.cwiseMax(0.0).sum();
        if (total <= 0.0)
            return 0;
        double acc = 0.0;
        for (Index i = 0; i < v.size(); ++i)
        {
            acc += std::max(v(i), 0.0);
            if (acc >= fraction * total)
                return i + 1;
        }
        return v.size();
    }

    /// Smallest eigenvalue relative to the largest (>= -1e-10 for a PSD estimate).
    double min_relative_eigenvalue() const
    {
        const RVector &v = eigenvalues();
        const double scale = std::max(std::abs(v(0)), std::numeric_limits<double>::min());
        return v(v.size() - 1) / scale;
    }

    bool is_psd(double tol = 1e-10) const { return trace() >= 0.0 && min_relative_eigenvalue() >= -tol; }

    CcmEstimate scaled(double mu) const { return CcmEstimate(mu * matrix_, link_, method_); }

private:
    struct Cache
    {
        std::mutex mutex;
        std::optional<EigenDecomposition> eig;
        std::optional<RVector> values;
    };

    CMatrix matrix_;
    Link link_;
    CcmMethod method_;
    std::shared_ptr<Cache> cache_;
};

/// Leading nu eigenpairs of an estimate.
struct Truncation
{
    CMatrix vectors; // M x nu
    RVector values;  // nu, non-increasing

    CMatrix reconstruct() const { return vectors * values.cast<cd>().asDiagonal() * vectors.adjoint(); }
};

inline Truncation truncate(const CcmEstimate &r, Index nu)
{
    require(nu >= 1 && nu <= r.dimension(), "truncate: nu must lie in [1, M]");
    const EigenDecomposition &e = r.eig(nu);
    return {e.vectors.leftCols(nu), e.values.head(nu)};
}

/// Sum_l w_l a_l a_l^H for the columns a_l of `atoms`.
inline CMatrix weighted_outer_sum(const CMatrix &atoms, const RVector &weights)
{
    require(atoms.cols() == weights.size(), "weighted_outer_sum: atom/weight count mismatch");
    CMatrix scaled = atoms * weights.cast<cd>().asDiagonal();
    CMatrix r = scaled * atoms.adjoint();
    // exact Hermitian symmetry; GEMM rounding leaves ~1e-17 asymmetry
    return 0.5 * (r + r.adjoint());
}

} // namespace iccm

#endif
