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

#ifndef ICCM_UPLINK_ESTIMATION_HPP
#define ICCM_UPLINK_ESTIMATION_HPP

#include "iccm/angle_estimation.hpp"
#include "iccm/ccm_estimate.hpp"
#include "iccm/random.hpp"

#include <span>

namespace iccm
{

/// Training SNRs are linear, not dB.
struct TrainingConfig
{
    double rho_u = 10.0;
    double rho_d = 10.0;
    Index kappa = 16;
    Index nu = 16;
    Index grid_points = 0; // L; 0 selects the default for kappa and M

    void validate(Index antennas) const
    {
        require(rho_u > 0.0 && rho_d > 0.0, "TrainingConfig: SNRs must be positive");
        require(kappa >= 1 && kappa <= antennas, "TrainingConfig: kappa must lie in [1, M]");
        require(nu >= 1 && nu <= antennas, "TrainingConfig: nu must lie in [1, M]");
        require(grid_points >= 0, "TrainingConfig: L must be >= 1 (or 0 for the default)");
    }

    // min(M, max(8, 4 kappa)) unless set explicitly.
    Index resolved_grid_points(Index antennas) const
    {
        if (grid_points > 0)
            return grid_points;
        return std::min<Index>(antennas, std::max<Index>(8, 4 * kappa));
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// h + n / sqrt(rho), n ~ CN(0, I).
inline CVector ls_preamble(const CVector &h, double rho, Rng &rng)
{
    require(rho > 0.0, "ls_preamble: SNR must be positive");
    if (std::isinf(rho))
        return h;
    return h + complex_gaussian(rng, h.size(), 1.0 / rho);
}

/// Matched-filter output of a group sharing one pilot: sum_i h_i + n / sqrt(rho).
inline CVector group_observation(std::span<const CVector> channels, double rho, Rng &rng)
{
    require(!channels.empty(), "group_observation: empty group");
    require(rho > 0.0, "group_observation: SNR must be positive");
    CVector sum = channels.front();
    for (std::size_t i = 1; i < channels.size(); ++i)
    {
        require(channels[i].size() == sum.size(), "group_observation: channel lengths differ");
        sum += channels[i];
    }
    if (std::isinf(rho))
        return sum;
    return sum + complex_gaussian(rng, sum.size(), 1.0 / rho);
}

/// Keep the beamspace bins Q of F Phi(psi) h and map back.
inline CVector sbem_estimate(const CVector &observation, double psi, const std::vector<Index> &bins)
{
    require(!bins.empty(), "sbem_estimate: Q must be non-empty");
    const CVector full = beamspace(observation, psi);
    CVector kept = CVector::Zero(full.size());
    for (Index q : bins)
    {
        require(q >= 0 && q < full.size(), "sbem_estimate: bin index out of range");
        kept(q) = full(q);
    }
    return from_beamspace(kept, psi);
}

enum class MmseMode
{
    full,      // multi-user inverse over the whole group
    asymptotic // per-user large-M form
};

/// R_k (I/rho + sum_i R_i)^{-1} h with each R replaced by its nu-truncation.
/// `group` lists every member's CCM (the owner included). With an empty group
/// the single-user form R_k (I/rho + R_k)^{-1} h is used.
inline CVector mmse_uplink(const CVector &h_sbem, const CcmEstimate &own, std::span<const CcmEstimate> group,
                           double rho, Index nu, MmseMode mode = MmseMode::full)
{
    const Index m = h_sbem.size();
    require(own.dimension() == m, "mmse_uplink: CCM dimension differs from channel length");
    require(rho > 0.0, "mmse_uplink: SNR must be positive");
    const Truncation tk = truncate(own, nu);

    if (mode == MmseMode::asymptotic)
    {
        RVector gain = tk.values.array() / (tk.values.array() + 1.0 / rho);
        return tk.vectors * (gain.cast<cd>().asDiagonal() * (tk.vectors.adjoint() * h_sbem));
    }

    // (I/rho + U D U^H)^{-1} x = rho (x - U (I/rho + D U^H U)^{-1} D U^H x)
    std::vector<Truncation> parts;
    if (group.empty())
        parts.push_back(tk);
    for (const CcmEstimate &r : group)
    {
        require(r.dimension() == m, "mmse_uplink: group CCM dimension mismatch");
        parts.push_back(truncate(r, nu));
    }
    const Index cols = nu * static_cast<Index>(parts.size());
    CMatrix u(m, cols);
    RVector d(cols);
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        u.middleCols(static_cast<Index>(i) * nu, nu) = parts[i].vectors;
        d.segment(static_cast<Index>(i) * nu, nu) = parts[i].values;
    }
    if (cols >= m)
    {
        // the low-rank update spans the space; solving directly avoids the
        // cancellation in rho (x - U z) at high SNR
        CMatrix s = u * d.cast<cd>().asDiagonal() * u.adjoint();
        s.diagonal().array() += 1.0 / rho;
        const CVector y = s.partialPivLu().solve(h_sbem);
        return tk.vectors * (tk.values.cast<cd>().asDiagonal() * (tk.vectors.adjoint() * y));
    }
    CMatrix inner = d.cast<cd>().asDiagonal() * (u.adjoint() * u);
    inner.diagonal().array() += 1.0 / rho;
    const CVector z = inner.partialPivLu().solve(d.cast<cd>().asDiagonal() * (u.adjoint() * h_sbem));
    const CVector y = rho * (h_sbem - u * z);
    return tk.vectors * (tk.values.cast<cd>().asDiagonal() * (tk.vectors.adjoint() * y));
}

} // namespace iccm

#endif
