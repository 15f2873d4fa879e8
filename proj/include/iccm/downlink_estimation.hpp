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

#ifndef ICCM_DOWNLINK_ESTIMATION_HPP
#define ICCM_DOWNLINK_ESTIMATION_HPP

#include "iccm/ccm_estimate.hpp"
#include "iccm/random.hpp"
#include "iccm/uplink_estimation.hpp"

#include <span>

namespace iccm
{

/// Training beams of one user: M x nu with orthonormal columns.
struct Beamformer
{
    CMatrix columns;
    int owner = 0;

    Index beams() const { return columns.cols(); }
    CMatrix projector() const { return columns * columns.adjoint(); }
};

inline Beamformer eigen_beamformer(const CcmEstimate &r, Index nu, int owner = 0)
{
    return {truncate(r, nu).vectors, owner};
}

namespace detail
{

inline CMatrix sum_beams(std::span<const Beamformer> beams, Index rows)
{
    require(!beams.empty(), "downlink: need at least one beamformer");
    const Index nu = beams.front().beams();
    CMatrix sum = CMatrix::Zero(rows, nu);
    for (const Beamformer &b : beams)
    {
        require(b.beams() == nu, "downlink: beamformers differ in nu");
        require(b.columns.rows() == rows, "downlink: beamformer row count differs from M");
        sum += b.columns;
    }
    return sum;
}

} // namespace detail

/// Fed-back observation (sum_i B_i)^H h_d + noise of variance 1/rho per entry.
inline CVector downlink_training(const CVector &h_d, std::span<const Beamformer> beams, double rho, Rng &rng)
{
    require(rho > 0.0, "downlink_training: SNR must be positive");
    const CMatrix sum = detail::sum_beams(beams, h_d.size());
    CVector obs = sum.adjoint() * h_d;
    if (!std::isinf(rho))
        obs += complex_gaussian(rng, obs.size(), 1.0 / rho);
    return obs;
}

/// R (sum_i B_i) ((sum_i B_i)^H R (sum_j B_j) + I/rho)^{-1} obs.
/// The asymptotic mode keeps only the owner's beams; `owner_index` selects
/// them from `beams`.
inline CVector mmse_downlink(const CVector &obs, const CcmEstimate &r, std::span<const Beamformer> beams,
                             double rho, MmseMode mode = MmseMode::full, std::size_t owner_index = 0)
{
    require(rho > 0.0, "mmse_downlink: SNR must be positive");
    CMatrix b;
    if (mode == MmseMode::asymptotic)
    {
        require(owner_index < beams.size(), "mmse_downlink: owner index out of range");
        b = beams[owner_index].columns;
        require(b.rows() == r.dimension(), "mmse_downlink: beamformer row count differs from M");
    }
    else
        b = detail::sum_beams(beams, r.dimension());
    require(obs.size() == b.cols(), "mmse_downlink: observation length differs from nu");
    const CMatrix rb = r.matrix() * b;
    CMatrix gram = b.adjoint() * rb;
    gram.diagonal().array() += 1.0 / rho;
    return rb * gram.partialPivLu().solve(obs);
}

} // namespace iccm

#endif
