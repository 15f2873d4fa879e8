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

#ifndef ICCM_SELFTEST_HPP
#define ICCM_SELFTEST_HPP

#include "iccm/experiment.hpp"

#include <ostream>

namespace iccm
{

/// Quick invariant checks on the installed build. Returns the number of
/// failed checks and prints one line per check.
inline int selftest(std::ostream &os)
{
    int failures = 0;
    auto check = [&](const char *name, auto &&fn) {
        bool ok = false;
        std::string detail;
        try
        {
            ok = fn();
        }
        catch (const std::exception &e)
        {
            detail = e.what();
        }
        os << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty())
            os << " (" << detail << ')';
        os << '\n';
        failures += ok ? 0 : 1;
    };

    const ArrayConfig cfg = ArrayConfig::half_wavelength(128, 2e9, 2.1e9);
    Rng rng(12345);
    std::uniform_real_distribution<double> angle(0.05, pi - 0.05);

    check("steering vectors have unit norm", [&] {
        for (int i = 0; i < 1000; ++i)
            if (std::abs(steering(cfg, Link::uplink, angle(rng)).norm() - 1.0) > 1e-12)
                return false;
        return true;
    });
    check("frequency shift maps uplink to downlink steering", [&] {
        for (int i = 0; i < 1000; ++i)
        {
            const double t = angle(rng);
            const CVector lhs = freq_shift_diagonal(cfg, t).cwiseProduct(steering(cfg, Link::uplink, t));
            if ((lhs - steering(cfg, Link::downlink, t)).norm() > 1e-12)
                return false;
        }
        return true;
    });
    check("DFT matrix is unitary", [&] {
        for (Index m : {1, 2, 7, 64, 128, 256})
        {
            const CMatrix f = dft_matrix(m);
            if ((f * f.adjoint() - CMatrix::Identity(m, m)).norm() > 1e-10)
                return false;
        }
        return true;
    });
    check("Hermitian eigendecomposition reconstructs its input", [&] {
        const CMatrix x = CMatrix::Random(32, 32);
        const CMatrix h = x + x.adjoint();
        const EigenDecomposition e = hermitian_eig(h);
        return relative_frobenius(e.reconstruct(), h) < 1e-8;
    });
    check("default scenario CCMs are Hermitian PSD and eta lies in [0,1]", [&] {
        ScenarioConfig c = default_scenario();
        c.trials = 4;
        bool ok = true;
        const SweepResult r = run_sweep(c, 1, [&](const CcmEstimate &e) {
            ok = ok && hermitian_defect(e.matrix()) <= 1e-10 && e.is_psd();
        });
        for (const auto &rec : r.records())
            if (rec.metric == Metric::eta_ul || rec.metric == Metric::eta_dl)
                ok = ok && rec.summary.mean >= 0.0 && rec.summary.mean <= 1.0;
        return ok;
    });
    check("sweeps are independent of the worker count", [&] {
        ScenarioConfig c = default_scenario();
        c.trials = 4;
        c.metrics = {Metric::nmse_ul, Metric::eta_ul};
        return to_csv(run_sweep(c, 1)) == to_csv(run_sweep(c, 3));
    });
    return failures;
}

} // namespace iccm

#endif
