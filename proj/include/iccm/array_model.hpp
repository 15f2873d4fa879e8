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

#ifndef ICCM_ARRAY_MODEL_HPP
#define ICCM_ARRAY_MODEL_HPP

#include "iccm/numerics.hpp"

#include <concepts>

namespace iccm
{

inline constexpr double speed_of_light = 299792458.0;

enum class Link
{
    uplink,
    downlink
};

inline const char *to_string(Link link) { return link == Link::uplink ? "uplink" : "downlink"; }

/// Uniform linear array and the two carriers of an FDD link pair.
struct ArrayConfig
{
    Index antennas = 128;       // M
    double spacing = 0.0;       // d [m]
    double uplink_hz = 2e9;     // f_u
    double downlink_hz = 2.1e9; // f_d
    double c = speed_of_light;

    /// Half-wavelength spacing at the uplink carrier.
    static ArrayConfig half_wavelength(Index antennas, double uplink_hz, double downlink_hz)
    {
        ArrayConfig cfg;
        cfg.antennas = antennas;
        cfg.uplink_hz = uplink_hz;
        cfg.downlink_hz = downlink_hz;
        cfg.spacing = speed_of_light / (2.0 * uplink_hz);
        cfg.validate();
        return cfg;
    }

    void validate() const
    {
        require(antennas >= 1, "ArrayConfig: antenna count must be >= 1");
        require(spacing > 0.0 && std::isfinite(spacing), "ArrayConfig: spacing must be positive");
        require(uplink_hz > 0.0 && downlink_hz > 0.0, "ArrayConfig: carriers must be positive");
        require(c > 0.0, "ArrayConfig: propagation speed must be positive");
    }

    // chi(f) = 2 pi f d / c
    double chi(double f) const { return 2.0 * pi * f * spacing / c; }
    double chi(Link link) const { return chi(carrier(link)); }
    double carrier(Link link) const { return link == Link::uplink ? uplink_hz : downlink_hz; }
};

/// Anything that maps (carrier, angle) to an array response vector.
template <typename T>
concept ArrayManifold = requires(const T &m, double f, double theta) {
    { m.size() } -> std::convertible_to<Index>;
    { m.response(f, theta) } -> std::convertible_to<CVector>;
};

/// ULA response exp(-j m chi(f) cos(theta)) / sqrt(M), m = 0..M-1.
class UniformLinearArray
{
public:
    explicit UniformLinearArray(ArrayConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    Index size() const { return cfg_.antennas; }
    const ArrayConfig &config() const { return cfg_; }

    CVector response(double f, double theta) const { return response_u(f, std::cos(theta)); }

    // Response as a function of the direction cosine u = cos(theta).
    CVector response_u(double f, double u) const
    {
        const Index m = cfg_.antennas;
        const double step = -cfg_.chi(f) * u;
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        CVector a(m);
        for (Index i = 0; i < m; ++i)
            a(i) = std::polar(scale, step * static_cast<double>(i));
        return a;
    }

private:
    ArrayConfig cfg_;
};

static_assert(ArrayManifold<UniformLinearArray>);

inline CVector steering(const ArrayConfig &cfg, double f, double theta)
{
    require(std::isfinite(theta), "steering: angle must be finite");
    return UniformLinearArray(cfg).response(f, theta);
}

inline CVector steering(const ArrayConfig &cfg, Link link, double theta)
{
    return steering(cfg, cfg.carrier(link), theta);
}

/// Columns a(theta_l) for every angle in `angles`.
inline CMatrix steering_matrix(const ArrayConfig &cfg, double f, const RVector &angles)
{
    CMatrix a(cfg.antennas, angles.size());
    UniformLinearArray ula(cfg);
    for (Index l = 0; l < angles.size(); ++l)
        a.col(l) = ula.response(f, angles(l));
    return a;
}

/// Diagonal of Phi(psi) = diag{1, e^{j psi}, ..., e^{j(M-1) psi}}.
inline CVector rotation_diagonal(Index antennas, double psi)
{
    CVector d(antennas);
    for (Index m = 0; m < antennas; ++m)
        d(m) = std::polar(1.0, psi * static_cast<double>(m));
    return d;
}

inline CMatrix rotation_matrix(const ArrayConfig &cfg, double psi)
{
    return rotation_diagonal(cfg.antennas, psi).asDiagonal();
}

/// True when psi lies in the rotation search range [-pi/M, pi/M]. Rotations
/// outside it are still valid unitary matrices.
inline bool rotation_in_search_range(const ArrayConfig &cfg, double psi)
{
    const double bound = pi / static_cast<double>(cfg.antennas);
    return std::abs(psi) <= bound * (1.0 + 1e-12);
}

/// Diagonal of Theta(theta), the uplink-to-downlink steering transformation.
inline CVector freq_shift_diagonal(const ArrayConfig &cfg, double theta)
{
    const double step = -2.0 * pi * cfg.spacing / cfg.c * (cfg.downlink_hz - cfg.uplink_hz) * std::cos(theta);
    CVector d(cfg.antennas);
    for (Index m = 0; m < cfg.antennas; ++m)
        d(m) = std::polar(1.0, step * static_cast<double>(m));
    return d;
}

inline CMatrix freq_shift(const ArrayConfig &cfg, double theta)
{
    require(std::isfinite(theta), "freq_shift: angle must be finite");
    return freq_shift_diagonal(cfg, theta).asDiagonal();
}

/// Covariance of a ULA response mixture:
/// [R]_{m,n} = (1/M) sum_l w_l exp(-j (m-n) x_l), with x_l the per-element
/// phase step of atom l (chi cos(theta_l), possibly shifted by a rotation).
/// The result is Hermitian Toeplitz, so only the M lags are accumulated.
inline CMatrix ula_covariance(Index antennas, const RVector &phase_steps, const RVector &weights)
{
    require(phase_steps.size() == weights.size(), "ula_covariance: phase/weight count mismatch");
    const Index m = antennas;
    CVector lag = CVector::Zero(m);
    for (Index l = 0; l < phase_steps.size(); ++l)
    {
        const double w = weights(l);
        if (w == 0.0)
            continue;
        // powers of exp(-j x) by recurrence, re-anchored every 32 lags
        const double x = phase_steps(l);
        const cd z = std::polar(1.0, -x);
        cd p{1.0, 0.0};
        for (Index k = 0; k < m; ++k)
        {
            if (k % 32 == 0)
                p = std::polar(1.0, -x * static_cast<double>(k));
            lag(k) += w * p;
            p *= z;
        }
    }
    lag /= static_cast<double>(m);
    lag(0) = cd(lag(0).real(), 0.0);

    CMatrix r(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            r(i, j) = i >= j ? lag(i - j) : std::conj(lag(j - i));
    return r;
}

} // namespace iccm

#endif
