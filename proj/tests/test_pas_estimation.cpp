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

#include "iccm/pas_estimation.hpp"
#include "iccm/random.hpp"

#include <catch_amalgamated.hpp>

using namespace iccm;
using Catch::Matchers::WithinAbs;

namespace
{

ArrayConfig array_of(Index m) { return ArrayConfig::half_wavelength(m, 2e9, 2.1e9); }

// Angle on DFT bin q of an M-element half-wavelength array.
double on_grid_angle(Index m, Index q) { return std::acos(-2.0 * static_cast<double>(q) / static_cast<double>(m)); }

} // namespace

TEST_CASE("angle grid spacing")
{
    const RVector one = angle_grid(1.0, 0.2, 1);
    REQUIRE(one.size() == 1);
    CHECK_THAT(one(0), WithinAbs(0.8, 1e-15));

    const RVector four = angle_grid(deg2rad(60.0), deg2rad(10.0), 4);
    const double expected[] = {50.0, 55.0, 60.0, 65.0};
    for (Index l = 0; l < 4; ++l)
        CHECK_THAT(rad2deg(four(l)), WithinAbs(expected[l], 1e-12));

    const RVector flat = angle_grid(1.0, 0.0, 16);
    REQUIRE(flat.size() == 1);
    CHECK(flat(0) == 1.0);

    CHECK_THROWS_AS(angle_grid(1.0, -0.1, 4), ContractViolation);
    CHECK_THROWS_AS(angle_grid(1.0, 0.1, 0), ContractViolation);
}

TEST_CASE("angle grid stays inside the interval")
{
    for (Index l : {1, 7, 64, 300})
    {
        const RVector g = angle_grid(1.5, 0.3, l);
        CHECK(g.minCoeff() >= 1.2 - 1e-15);
        CHECK(g.maxCoeff() < 1.8);
    }
}

TEST_CASE("LS fits a single atom exactly")
{
    const ArrayConfig cfg = array_of(128);
    const cd alpha = std::polar(2.0, pi / 3);
    const double t = 1.1;
    const GainGrid g = gains_ls(cfg, alpha * steering(cfg, Link::uplink, t), 0.0, RVector::Constant(1, t));
    CHECK(std::abs(g.gains(0) - alpha) < 1e-12);
}

TEST_CASE("LS recovers two separated atoms")
{
    const ArrayConfig cfg = array_of(128);
    const cd a1(0.7, -0.2), a2(-1.1, 0.4);
    RVector t(2);
    t << deg2rad(50.0), deg2rad(110.0);
    const CVector h = a1 * steering(cfg, Link::uplink, t(0)) + a2 * steering(cfg, Link::uplink, t(1));
    const GainGrid g = gains_ls(cfg, h, 0.0, t);
    CHECK(std::abs(g.gains(0) - a1) < 1e-6 * std::abs(a1));
    CHECK(std::abs(g.gains(1) - a2) < 1e-6 * std::abs(a2));
}

TEST_CASE("LS gains minimize the residual")
{
    const ArrayConfig cfg = array_of(32);
    Rng rng(1);
    const CVector h = complex_gaussian(rng, 32, 1.0);
    const RVector t = angle_grid(1.4, 0.4, 10);
    const double psi = 0.05;
    const GainGrid g = gains_ls(cfg, h, psi, t);
    const CMatrix a = steering_matrix(cfg, cfg.uplink_hz, t);
    const CVector target = h.cwiseProduct(rotation_diagonal(32, psi));
    const double best = (target - a * g.gains).norm();
    for (int i = 0; i < 100; ++i)
    {
        const CVector z = g.gains + complex_gaussian(rng, 10, 0.01);
        CHECK(best <= (target - a * z).norm() + 1e-12);
    }
}

TEST_CASE("LS refuses underdetermined grids")
{
    const ArrayConfig cfg = array_of(8);
    CHECK_THROWS_AS(gains_ls(cfg, CVector::Ones(8), 0.0, angle_grid(1.0, 0.5, 9)), ContractViolation);
}

TEST_CASE("DTFT gain is exact at the true angle")
{
    const ArrayConfig cfg = array_of(128);
    const cd alpha(0.3, 1.7);
    const double t0 = 1.234;
    const CVector h = alpha * steering(cfg, Link::uplink, t0);
    RVector t(3);
    t << 1.0, t0, 1.5;
    const GainGrid g = gains_dtft(cfg, h, 0.0, t);
    CHECK(std::abs(g.gains(1) - alpha) < 1e-12);
    // a rotated frame is undone by the phase term
    CHECK(std::abs(gains_dtft(cfg, h, 0.017, t).gains(1) - alpha) < 1e-12);
}

TEST_CASE("DTFT leakage obeys the aliased sinc bound")
{
    const ArrayConfig cfg = array_of(128);
    const double chi = cfg.chi(Link::uplink);
    const cd alpha(1.5, -0.5);
    const double t0 = deg2rad(75.0);
    const CVector h = alpha * steering(cfg, Link::uplink, t0);
    const RVector t = angle_grid(t0, deg2rad(30.0), 200);
    const GainGrid g = gains_dtft(cfg, h, 0.0, t);
    for (Index l = 0; l < t.size(); ++l)
    {
        const double x = std::abs(chi * std::cos(t(l)) - chi * std::cos(t0));
        if (x < 1e-9 || x > pi)
            continue;
        CHECK(std::abs(g.gains(l)) <= std::abs(alpha) / (128.0 * x / pi) * (1.0 + 1e-9));
    }
}

TEST_CASE("DTFT gains of a zero channel vanish")
{
    const ArrayConfig cfg = array_of(64);
    CHECK(gains_dtft(cfg, CVector::Zero(64), 0.01, angle_grid(1.0, 0.3, 100)).gains.norm() == 0.0);
}

TEST_CASE("DTFT gains are linear")
{
    const ArrayConfig cfg = array_of(64);
    Rng rng(2);
    const CVector x = complex_gaussian(rng, 64, 1.0), y = complex_gaussian(rng, 64, 1.0);
    const RVector t = angle_grid(1.0, 0.3, 100);
    const cd a(0.5, 2.0);
    const CVector lhs = gains_dtft(cfg, a * x + y, 0.01, t).gains;
    const CVector rhs = a * gains_dtft(cfg, x, 0.01, t).gains + gains_dtft(cfg, y, 0.01, t).gains;
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("LS and DTFT agree on orthogonal atoms")
{
    const ArrayConfig cfg = array_of(256);
    RVector t(2);
    t << on_grid_angle(256, 30), on_grid_angle(256, -70);
    const CVector h = cd(1.0, 0.5) * steering(cfg, Link::uplink, t(0)) + cd(-0.3, 0.8) * steering(cfg, Link::uplink, t(1));
    const CVector ls = gains_ls(cfg, h, 0.0, t).gains;
    const CVector dt = gains_dtft(cfg, h, 0.0, t).gains;
    CHECK((ls - dt).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("gain path selection")
{
    const ArrayConfig cfg = array_of(16);
    Rng rng(3);
    const CVector h = complex_gaussian(rng, 16, 1.0);
    const RVector small = angle_grid(1.0, 0.3, 16), large = angle_grid(1.0, 0.3, 17);
    CHECK((estimate_gains(cfg, h, 0.0, small).gains - gains_ls(cfg, h, 0.0, small).gains).norm() == 0.0);
    CHECK((estimate_gains(cfg, h, 0.0, large).gains - gains_dtft(cfg, h, 0.0, large).gains).norm() == 0.0);
}

TEST_CASE("DTFT power of a specular ray concentrates in its main lobe")
{
    // Every resolution cell holds about a dozen points of a 2M grid over
    // +-10 degrees, so the power sum is compared against the main lobe
    // |u - u0| <= 2 / M rather than the single true-angle sample.
    const ArrayConfig cfg = array_of(128);
    const double t0 = deg2rad(70.0);
    const CVector h = steering(cfg, Link::uplink, t0);
    const RVector t = angle_grid(t0, deg2rad(10.0), 256);
    const RVector p = gains_dtft(cfg, h, 0.0, t).powers();
    Index peak = 0;
    p.maxCoeff(&peak);
    CHECK_THAT(t(peak), WithinAbs(t0, 1e-12));
    CHECK_THAT(p(peak), WithinAbs(1.0, 1e-12));
    double lobe = 0.0;
    for (Index l = 0; l < t.size(); ++l)
        if (std::abs(std::cos(t(l)) - std::cos(t0)) <= 2.0 / 128.0)
            lobe += p(l);
    CHECK(lobe >= 0.9 * p.sum());
}
