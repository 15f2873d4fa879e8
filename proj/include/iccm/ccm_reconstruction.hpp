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

#ifndef ICCM_CCM_RECONSTRUCTION_HPP
#define ICCM_CCM_RECONSTRUCTION_HPP

#include "iccm/ccm_estimate.hpp"
#include "iccm/channel_synthesis.hpp"
#include "iccm/pas_estimation.hpp"

namespace iccm
{

/// sum_l |alpha_l|^2 Phi(psi)^H a(theta_l) a(theta_l)^H Phi(psi), steering at the
/// carrier of `link`.
inline CcmEstimate ic_pccm(const ArrayConfig &cfg, const GainGrid &grid, Link link = Link::uplink)
{
    require(grid.size() >= 1, "ic_pccm: empty gain grid");
    require(grid.gains.size() == grid.size(), "ic_pccm: angle/gain count mismatch");
    // Phi^H a(theta) is a steering vector with phase step chi cos(theta) + psi.
    RVector steps = (cfg.chi(link) * grid.angles.array().cos() + grid.psi).matrix();
    return CcmEstimate(ula_covariance(cfg.antennas, steps, grid.powers()), link, CcmMethod::ic_pccm);
}

/// Downlink CCM from uplink gains: each atom passes through Theta(theta_l),
/// powers scaled by mu.
inline CcmEstimate infer_downlink(const ArrayConfig &cfg, const GainGrid &grid, double mu = 1.0)
{
    require(mu > 0.0 && std::isfinite(mu), "infer_downlink: mu must be positive");
    require(grid.size() >= 1, "infer_downlink: empty gain grid");
    // Theta(theta) Phi^H a_u(theta) has phase step chi_d cos(theta) + psi.
    RVector steps = (cfg.chi(Link::downlink) * grid.angles.array().cos() + grid.psi).matrix();
    RVector powers = mu * grid.powers();
    return CcmEstimate(ula_covariance(cfg.antennas, steps, powers), Link::downlink, CcmMethod::ic_pccm);
}

namespace detail
{

inline CcmEstimate specular(const ArrayConfig &cfg, Link link, double mean, CcmMethod method)
{
    return CcmEstimate(arrival_covariance(cfg, cfg.carrier(link), RVector::Constant(1, mean), RVector::Ones(1)),
                       link, method);
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

template <typename Lag>
CMatrix toeplitz(Index m, Lag lag)
{
    CVector col(m);
    for (Index k = 0; k < m; ++k)
        col(k) = lag(static_cast<double>(k));
    col(0) = cd(col(0).real(), 0.0);
    CMatrix r(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            r(i, j) = i >= j ? col(i - j) : std::conj(col(j - i));
    return r;
}

} // namespace detail

/// Closed form for a uniform PAS under the narrow-spread approximation:
/// [R]_{m,n} = (1/M) e^{-j chi_mn cos(mean)} sinc(chi_mn spread sin(mean)).
inline CcmEstimate cf_iccm_uniform(const ArrayConfig &cfg, Link link, double mean, double spread)
{
    require(spread >= 0.0 && std::isfinite(mean), "cf_iccm_uniform: invalid parameters");
    if (spread == 0.0)
        return detail::specular(cfg, link, mean, CcmMethod::cf_iccm);
    const double chi = cfg.chi(link);
    const double inv_m = 1.0 / static_cast<double>(cfg.antennas);
    const double c = std::cos(mean), s = std::sin(mean);
    CMatrix r = detail::toeplitz(cfg.antennas, [&](double k) {
        const double x = k * chi;
        return std::polar(inv_m * detail::sinc(x * spread * s), -x * c);
    });
    return CcmEstimate(std::move(r), link, CcmMethod::cf_iccm);
}

/// Closed form for a Laplacian PAS under the narrow-spread approximation,
/// evaluated with the mean angle in every sine factor.
inline CcmEstimate cf_iccm_laplacian(const ArrayConfig &cfg, Link link, double mean, double spread)
{
    require(spread >= 0.0 && std::isfinite(mean), "cf_iccm_laplacian: invalid parameters");
    if (spread == 0.0)
        return detail::specular(cfg, link, mean, CcmMethod::cf_iccm);
    const double chi = cfg.chi(link);
    const double m = static_cast<double>(cfg.antennas);
    const double c = std::cos(mean), s = std::sin(mean);
    const double e = std::exp(-std::sqrt(2.0));
    CMatrix r = detail::toeplitz(cfg.antennas, [&](double k) {
        const double x = k * chi * spread * s;
        const double body = 2.0 * std::sqrt(2.0) * (1.0 - e * std::cos(x)) + 2.0 * e * x * x * detail::sinc(x);
        const double mag = body / (std::sqrt(2.0) * m * (2.0 + x * x));
        return std::polar(mag, -k * chi * c);
    });
    return CcmEstimate(std::move(r), link, CcmMethod::cf_iccm);
}

inline CcmEstimate cf_iccm(const ArrayConfig &cfg, Link link, PasKind kind, double mean, double spread)
{
    switch (kind)
    {
    case PasKind::uniform: return cf_iccm_uniform(cfg, link, mean, spread);
    case PasKind::laplacian: return cf_iccm_laplacian(cfg, link, mean, spread);
    case PasKind::tabulated: break;
    }
    throw ContractViolation("cf_iccm: no closed form for a tabulated PAS");
}

/// Trapezoid quadrature of the PAS integral over the model support.
inline CcmEstimate mc_iccm(const ArrayConfig &cfg, Link link, const PasModel &model,
                           Index points = default_quadrature_points)
{
    return CcmEstimate(pas_covariance(cfg, cfg.carrier(link), model, points, false), link, CcmMethod::mc_iccm);
}

/// f_l^H R f_l for every DFT column f_l.
inline RVector beamspace_spectrum(const CcmEstimate &r)
{
    const CMatrix f = dft_matrix(r.dimension());
    const CMatrix rf = r.matrix() * f;
    RVector out(r.dimension());
    for (Index l = 0; l < out.size(); ++l)
        out(l) = std::max(0.0, f.col(l).dot(rf.col(l)).real());
    return out;
}

} // namespace iccm

#endif
