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

#ifndef ICCM_METRICS_HPP
#define ICCM_METRICS_HPP

#include "iccm/ccm_estimate.hpp"

#include <span>

namespace iccm
{

/// eta = tr(B^H R B) / tr(R): share of the true CCM's power inside span(B).
inline double efficiency(const CcmEstimate &r_true, const CMatrix &b)
{
    require(b.rows() == r_true.dimension(), "efficiency: beamformer row count differs from M");
    const CMatrix gram = b.adjoint() * b;
    require((gram - CMatrix::Identity(b.cols(), b.cols())).norm() <= 1e-8,
            "efficiency: beamformer columns are not orthonormal");
    const double total = r_true.trace();
    require(total > 0.0, "efficiency: true CCM has zero trace");
    const double captured = (b.adjoint() * r_true.matrix() * b).trace().real();
    return std::clamp(captured / total, 0.0, 1.0);
}

/// ||h - h_hat||^2 / ||h||^2.
inline double nmse(const CVector &h, const CVector &h_hat)
{
    require(h.size() == h_hat.size(), "nmse: length mismatch");
    const double power = h.squaredNorm();
    if (!(power > 0.0))
        throw DegenerateInput("nmse: zero true channel");
    return (h - h_hat).squaredNorm() / power;
}

/// Mean and standard error of the mean (0 for a single sample).
struct Summary
{
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

inline Summary summarize(std::span<const double> xs)
{
    Summary s;
    s.count = xs.size();
    if (xs.empty())
        return s;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1)
    {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return s;
}

} // namespace iccm

#endif
