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

#ifndef ICCM_PAS_ESTIMATION_HPP
#define ICCM_PAS_ESTIMATION_HPP

#include "iccm/array_model.hpp"

namespace iccm
{

/// Complex gains on an angle grid, estimated in the frame rotated by psi.
struct GainGrid
{
    RVector angles;
    CVector gains;
    double psi = 0.0;

    Index size() const { return angles.size(); }
    RVector powers() const { return gains.cwiseAbs2(); }
};

/// theta_l = mean - spread + 2 spread l / L, l = 0..L-1. Collapses to the
/// single angle `mean` when spread is 0.
inline RVector angle_grid(double mean, double spread, Index points)
{
    require(spread >= 0.0, "angle_grid: spread must be >= 0");
    require(points >= 1, "angle_grid: L must be >= 1");
    if (spread == 0.0)
        return RVector::Constant(1, mean);
    RVector out(points);
    for (Index l = 0; l < points; ++l)
        out(l) = mean - spread + 2.0 * spread * static_cast<double>(l) / static_cast<double>(points);
    return out;
}

/// alpha = A(theta)^+ Phi(psi) h with uplink steering columns. Requires L <= M.
inline GainGrid gains_ls(const ArrayConfig &cfg, const CVector &h, double psi, const RVector &angles)
{
    require(h.size() == cfg.antennas, "gains_ls: channel length differs from M");
    require(angles.size() >= 1, "gains_ls: empty angle grid");
    require(angles.size() <= cfg.antennas, "gains_ls: L > M is underdetermined, use gains_dtft");
    const CMatrix a = steering_matrix(cfg, cfg.uplink_hz, angles);
    const CVector rotated = h.cwiseProduct(rotation_diagonal(cfg.antennas, psi));
    return {angles, pseudo_inverse(a) * rotated, psi};
}

/// alpha_l = (1/sqrt(M)) sum_m [Phi(psi) h]_m exp(-j m xi_l), xi_l = psi - chi cos(theta_l).
inline GainGrid gains_dtft(const ArrayConfig &cfg, const CVector &h, double psi, const RVector &angles)
{
    require(h.size() == cfg.antennas, "gains_dtft: channel length differs from M");
    require(angles.size() >= 1, "gains_dtft: empty angle grid");
    const Index m = cfg.antennas;
    const double chi = cfg.chi(Link::uplink);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    const CVector rotated = h.cwiseProduct(rotation_diagonal(m, psi));
    CVector g(angles.size());
    for (Index l = 0; l < angles.size(); ++l)
    {
        const double xi = psi - chi * std::cos(angles(l));
        cd acc{0.0, 0.0};
        for (Index i = 0; i < m; ++i)
            acc += rotated(i) * std::polar(1.0, -xi * static_cast<double>(i));
        g(l) = scale * acc;
    }
    return {angles, g, psi};
}

/// LS for L <= M, DTFT sampling otherwise.
inline GainGrid estimate_gains(const ArrayConfig &cfg, const CVector &h, double psi, const RVector &angles)
{
    return angles.size() <= cfg.antennas ? gains_ls(cfg, h, psi, angles) : gains_dtft(cfg, h, psi, angles);
}

} // namespace iccm

#endif
