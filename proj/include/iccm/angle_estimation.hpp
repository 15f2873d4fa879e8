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

#ifndef ICCM_ANGLE_ESTIMATION_HPP
#define ICCM_ANGLE_ESTIMATION_HPP

#include "iccm/array_model.hpp"

#include <numeric>
#include <vector>

namespace iccm
{

inline constexpr Index default_rotation_grid = 64;

/// Rotation, beamspace index set and the AOA interval inferred from them.
struct AngleEstimate
{
    double psi = 0.0;
    std::vector<Index> bins; // Q, ascending
    double u_lo = -1.0;
    double u_hi = 1.0;
    double theta_lo = 0.0;
    double theta_hi = pi;
    double mean = pi / 2;   // midpoint of [theta_lo, theta_hi]
    double spread = pi / 2; // half-width
    double captured_fraction = 0.0;
    bool contiguous = true;

    Index kappa() const { return static_cast<Index>(bins.size()); }
};

/// F Phi(psi) h.
inline CVector beamspace(const CVector &h, double psi)
{
    return unitary_dft(h.cwiseProduct(rotation_diagonal(h.size(), psi)));
}

/// Phi(psi)^H F^H c.
inline CVector from_beamspace(const CVector &c, double psi)
{
    return unitary_idft(c).cwiseProduct(rotation_diagonal(c.size(), psi).conjugate());
}

/// The G candidate rotations, psi_g = 2 pi (g - floor(G/2)) / (M G).
/// Rotations 2 pi/M apart differ only by a one-bin shift, so the grid covers
/// [-pi/M, pi/M) once and always contains psi = 0.
inline RVector rotation_grid(Index antennas, Index grid)
{
    require(grid >= 1, "rotation_grid: grid size must be >= 1");
    const double step = 2.0 * pi / (static_cast<double>(antennas) * static_cast<double>(grid));
    RVector out(grid);
    for (Index g = 0; g < grid; ++g)
        out(g) = step * static_cast<double>(g - grid / 2);
    return out;
}

/// Indices of the kappa largest entries; ties go to the lower index. Ascending.
inline std::vector<Index> top_bins(const RVector &power, Index kappa)
{
    std::vector<Index> idx(static_cast<std::size_t>(power.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::partial_sort(idx.begin(), idx.begin() + kappa, idx.end(), [&](Index a, Index b) {
        return power(a) > power(b) || (power(a) == power(b) && a < b);
    });
    idx.resize(static_cast<std::size_t>(kappa));
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Signed bin alias: q for q <= M/2, q - M otherwise.
inline Index signed_alias(Index q, Index antennas) { return 2 * q <= antennas ? q : q - antennas; }

/// Maximize ||[F Phi(psi) h]_Q||^2 over the rotation grid and |Q| = kappa.
/// Fills psi, bins, captured_fraction and contiguous only.
inline AngleEstimate rotation_search(const CVector &h, Index kappa, Index grid = default_rotation_grid)
{
    const Index m = h.size();
    require(m >= 1, "rotation_search: empty channel");
    require(kappa >= 1 && kappa <= m, "rotation_search: kappa must lie in [1, M]");
    const double total = h.squaredNorm();
    if (!(total > 0.0))
        throw DegenerateInput("rotation_search: degenerate input (all-zero channel)");

    const RVector psis = rotation_grid(m, grid);
    // Visit candidates by increasing |psi|, then index, and only accept strict
    // improvements so that ties resolve to the smaller rotation.
    std::vector<Index> order(static_cast<std::size_t>(psis.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(psis(a)) < std::abs(psis(b)); });

    AngleEstimate best;
    double best_power = -1.0;
    for (Index g : order)
    {
        const RVector power = beamspace(h, psis(g)).cwiseAbs2();
        std::vector<Index> q = top_bins(power, kappa);
        double captured = 0.0;
        for (Index b : q)
            captured += power(b);
        if (captured > best_power * (1.0 + 1e-12))
        {
            best_power = captured;
            best.psi = psis(g);
            best.bins = std::move(q);
        }
    }
    best.captured_fraction = std::min(1.0, best_power / total);

    std::vector<Index> aliases;
    for (Index q : best.bins)
        aliases.push_back(signed_alias(q, m));
    std::sort(aliases.begin(), aliases.end());
    best.contiguous = true;
    for (std::size_t i = 1; i < aliases.size(); ++i)
        if (aliases[i] != aliases[i - 1] + 1)
            best.contiguous = false;
    return best;
}

/// Cosine-space centre of bin q under rotation psi.
inline double bin_center(const ArrayConfig &cfg, double psi, Index q)
{
    const double m = static_cast<double>(cfg.antennas);
    return (psi - 2.0 * pi * static_cast<double>(signed_alias(q, cfg.antennas)) / m) / cfg.chi(Link::uplink);
}

/// Convex hull of the bin cells of Q in cosine space, clamped to [-1, 1].
inline void infer_interval(const ArrayConfig &cfg, AngleEstimate &est)
{
    require(!est.bins.empty(), "infer_interval: Q must be non-empty");
    const double half_bin = pi / (static_cast<double>(cfg.antennas) * cfg.chi(Link::uplink));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index q : est.bins)
    {
        const double u = bin_center(cfg, est.psi, q);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    lo = std::max(-1.0, lo - half_bin);
    hi = std::min(1.0, hi + half_bin);
    if (lo > hi)
        throw DegenerateInput("infer_interval: angles outside visible region");
    est.u_lo = lo;
    est.u_hi = hi;
    est.theta_lo = std::acos(hi);
    est.theta_hi = std::acos(lo);
    est.mean = 0.5 * (est.theta_lo + est.theta_hi);
    est.spread = 0.5 * (est.theta_hi - est.theta_lo);
}

inline AngleEstimate infer_interval(const ArrayConfig &cfg, double psi, std::vector<Index> bins)
{
    AngleEstimate est;
    est.psi = psi;
    est.bins = std::move(bins);
    std::sort(est.bins.begin(), est.bins.end());
    infer_interval(cfg, est);
    return est;
}

/// Rotation search followed by interval inference.
inline AngleEstimate estimate_angles(const ArrayConfig &cfg, const CVector &h, Index kappa,
                                     Index grid = default_rotation_grid)
{
    require(h.size() == cfg.antennas, "estimate_angles: channel length differs from M");
    AngleEstimate est = rotation_search(h, kappa, grid);
    infer_interval(cfg, est);
    return est;
}

/// Gap between two cosine-space intervals, 0 when they touch or overlap.
inline double angular_distance(const AngleEstimate &a, const AngleEstimate &b)
{
    return std::max(0.0, std::max(a.u_lo, b.u_lo) - std::min(a.u_hi, b.u_hi));
}

} // namespace iccm

#endif
