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

#ifndef ICCM_CHANNEL_SYNTHESIS_HPP
#define ICCM_CHANNEL_SYNTHESIS_HPP

#include "iccm/array_model.hpp"
#include "iccm/ccm_estimate.hpp"
#include "iccm/random.hpp"

#include <string_view>

namespace iccm
{

enum class PasKind
{
    uniform,
    laplacian,
    tabulated
};

inline std::string_view to_string(PasKind k)
{
    switch (k)
    {
    case PasKind::uniform: return "uniform";
    case PasKind::laplacian: return "laplacian";
    case PasKind::tabulated: return "tabulated";
    }
    return "?";
}

inline PasKind pas_kind_from_string(std::string_view s)
{
    if (s == "uniform")
        return PasKind::uniform;
    if (s == "laplacian")
        return PasKind::laplacian;
    if (s == "tabulated")
        return PasKind::tabulated;
    throw ContractViolation("unknown PAS kind '" + std::string(s) + "'");
}

/// Power angular spectrum of one multipath component. Angles in radians.
///
/// The support is [mean - spread, mean + spread]. Uniform and Laplacian
/// densities are the unit-parameter families of the channel model; a
/// tabulated density is linearly interpolated between its samples and is
/// zero outside the sample range.
struct PasModel
{
    PasKind kind = PasKind::uniform;
    double mean = pi / 2;
    double spread = 0.0;
    RVector table_angles;
    RVector table_density;

    static PasModel uniform(double mean, double spread) { return {PasKind::uniform, mean, spread, {}, {}}; }
    static PasModel laplacian(double mean, double spread) { return {PasKind::laplacian, mean, spread, {}, {}}; }
    static PasModel tabulated(double mean, double spread, RVector angles, RVector density)
    {
        return {PasKind::tabulated, mean, spread, std::move(angles), std::move(density)};
    }

    double lower() const { return mean - spread; }
    double upper() const { return mean + spread; }

    /// With check_support false the support may touch the endpoints of
    /// [0, pi]; estimated intervals clamped to the visible region need that.
    void validate(bool check_support = true) const
    {
        require(std::isfinite(mean) && std::isfinite(spread), "PasModel: non-finite parameters");
        require(spread >= 0.0, "PasModel: spread must be >= 0");
        if (check_support)
            require(lower() > 0.0 && upper() < pi, "PasModel: support must lie inside (0, pi)");
        else
            require(lower() >= 0.0 && upper() <= pi, "PasModel: support must lie inside [0, pi]");
        if (kind == PasKind::tabulated)
        {
            require(table_angles.size() >= 2 && table_angles.size() == table_density.size(),
                    "PasModel: tabulated density needs >= 2 matching samples");
            require((table_density.array() >= 0.0).all() && table_density.allFinite(),
                    "PasModel: tabulated densities must be finite and >= 0");
            for (Index i = 1; i < table_angles.size(); ++i)
                require(table_angles(i) > table_angles(i - 1), "PasModel: tabulated angles must increase");
        }
    }

    /// S(theta); zero outside the support.
    double density(double theta) const
    {
        if (theta < lower() || theta > upper())
            return 0.0;
        if (spread == 0.0)
            return 0.0;
        switch (kind)
        {
        case PasKind::uniform: return 1.0 / (2.0 * spread);
        case PasKind::laplacian:
            return std::exp(-std::sqrt(2.0) * std::abs(theta - mean) / spread) / (std::sqrt(2.0) * spread);
        case PasKind::tabulated: return interpolate(theta);
        }
        return 0.0;
    }

private:
    double interpolate(double theta) const
    {
        const Index n = table_angles.size();
        if (theta < table_angles(0) || theta > table_angles(n - 1))
            return 0.0;
        const auto *first = table_angles.data();
        const auto *it = std::upper_bound(first, first + n, theta);
        Index i = std::clamp<Index>(static_cast<Index>(it - first) - 1, 0, n - 2);
        const double t = (theta - table_angles(i)) / (table_angles(i + 1) - table_angles(i));
        return (1.0 - t) * table_density(i) + t * table_density(i + 1);
    }
};

/// Equispaced nodes over the support with trapezoid weights.
struct Quadrature
{
    RVector nodes;
    RVector weights;
};

inline Quadrature trapezoid(double lo, double hi, Index n)
{
    require(n >= 1, "trapezoid: need at least one node");
    Quadrature q;
    if (n == 1)
    {
        q.nodes = RVector::Constant(1, 0.5 * (lo + hi));
        q.weights = RVector::Constant(1, hi - lo);
        return q;
    }
    q.nodes = RVector::LinSpaced(n, lo, hi);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    q.weights = RVector::Constant(n, h);
    q.weights(0) = q.weights(n - 1) = 0.5 * h;
    return q;
}

/// Nodes and S(theta_i) w_i for a PAS model.
inline Quadrature pas_quadrature(const PasModel &model, Index n)
{
    Quadrature q = trapezoid(model.lower(), model.upper(), n);
    for (Index i = 0; i < q.nodes.size(); ++i)
        q.weights(i) *= model.density(q.nodes(i));
    return q;
}

struct RaySet
{
    RVector angles;
    RVector amplitudes;
    RVector phases;

    Index size() const { return angles.size(); }
    double power() const { return amplitudes.squaredNorm(); }
};

struct ChannelRealization
{
    CVector vector;
    int user = 0;
    long slot = 0;
    Link link = Link::uplink;

    Index size() const { return vector.size(); }
};

inline constexpr Index default_ray_count = 256;
inline constexpr Index default_quadrature_points = 2048;

/// Discretize a PAS into R rays with trapezoid amplitudes and random phases.
inline RaySet build_rays(const PasModel &model, Index rays, Rng &rng)
{
    require(rays >= 1, "build_rays: ray count must be >= 1");
    model.validate();
    RaySet out;
    if (model.spread == 0.0)
    {
        out.angles = RVector::Constant(1, model.mean);
        out.amplitudes = RVector::Ones(1);
    }
    else
    {
        const Quadrature q = pas_quadrature(model, rays);
        out.angles = q.nodes;
        out.amplitudes = q.weights.cwiseSqrt();
    }
    out.phases.resize(out.angles.size());
    for (Index r = 0; r < out.phases.size(); ++r)
        out.phases(r) = uniform_phase(rng);
    return out;
}

inline RaySet redraw_phases(RaySet rays, Rng &rng)
{
    for (Index r = 0; r < rays.phases.size(); ++r)
        rays.phases(r) = uniform_phase(rng);
    return rays;
}

inline RaySet scale_amplitudes(RaySet rays, double factor)
{
    require(factor >= 0.0 && std::isfinite(factor), "scale_amplitudes: factor must be finite and >= 0");
    rays.amplitudes *= factor;
    return rays;
}

/// Ray coefficients amplitude_r e^{j phase_r}.
inline CVector ray_coefficients(const RaySet &rays)
{
    CVector c(rays.size());
    for (Index r = 0; r < rays.size(); ++r)
        c(r) = std::polar(rays.amplitudes(r), rays.phases(r));
    return c;
}

/// h = sum_r amplitude_r e^{j phase_r} a(theta_r) at carrier f.
inline CVector synthesize_vector(const ArrayConfig &cfg, double f, const RaySet &rays)
{
    require(rays.angles.size() == rays.amplitudes.size() && rays.angles.size() == rays.phases.size(),
            "synthesize: ray field sizes differ");
    return steering_matrix(cfg, f, rays.angles) * ray_coefficients(rays);
}

inline ChannelRealization synthesize(const ArrayConfig &cfg, Link link, const RaySet &rays, int user = 0,
                                     long slot = 0)
{
    return {synthesize_vector(cfg, cfg.carrier(link), rays), user, slot, link};
}

/// Covariance of a weighted set of arrivals, Toeplitz form.
inline CMatrix arrival_covariance(const ArrayConfig &cfg, double f, const RVector &angles, const RVector &powers)
{
    const double chi = cfg.chi(f);
    RVector steps = (chi * angles.array().cos()).matrix();
    return ula_covariance(cfg.antennas, steps, powers);
}

/// Quadrature covariance of a PAS at carrier f. Exact rank-1 for zero spread.
inline CMatrix pas_covariance(const ArrayConfig &cfg, double f, const PasModel &model, Index points,
                              bool check_support = true)
{
    require(points >= 2, "pas_covariance: need at least 2 quadrature points");
    model.validate(check_support);
    if (model.spread == 0.0)
        return arrival_covariance(cfg, f, RVector::Constant(1, model.mean), RVector::Ones(1));
    const Quadrature q = pas_quadrature(model, points);
    return arrival_covariance(cfg, f, q.nodes, q.weights);
}

inline CcmEstimate true_ccm(const ArrayConfig &cfg, Link link, const PasModel &model,
                            Index points = default_quadrature_points)
{
    return CcmEstimate(pas_covariance(cfg, cfg.carrier(link), model, points), link, CcmMethod::true_quadrature);
}

} // namespace iccm

#endif
