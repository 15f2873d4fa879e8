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

#ifndef ICCM_RANDOM_HPP
#define ICCM_RANDOM_HPP

#include "iccm/numerics.hpp"

#include <cstdint>
#include <random>

namespace iccm
{

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of an independent stream: master seed xor a hash of the counter.
/// Depends only on (master, counter), never on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter)
{
    return master ^ mix64(counter);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t counter) { return Rng(derive_seed(master, counter)); }

/// Circularly-symmetric complex Gaussian vector with the given per-entry variance.
inline CVector complex_gaussian(Rng &rng, Index n, double variance = 1.0)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    CVector v(n);
    for (Index i = 0; i < n; ++i)
    {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cd(re, im);
    }
    return v;
}

inline double uniform_phase(Rng &rng)
{
    std::uniform_real_distribution<double> dist(-pi, pi);
    return dist(rng);
}

} // namespace iccm

#endif
