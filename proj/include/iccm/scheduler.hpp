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

#ifndef ICCM_SCHEDULER_HPP
#define ICCM_SCHEDULER_HPP

#include "iccm/angle_estimation.hpp"

#include <span>
#include <vector>

namespace iccm
{

/// Users partitioned into pilot-sharing groups. User ids are positions in
/// the estimate list handed to adma_group.
struct GroupAssignment
{
    std::vector<std::vector<int>> groups;
    double guard = 0.0;

    std::size_t size() const { return groups.size(); }

    /// Index of the group holding `user`, or -1.
    int group_of(int user) const
    {
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (int u : groups[g])
                if (u == user)
                    return static_cast<int>(g);
        return -1;
    }
};

/// Two users may not share a pilot when their intervals overlap or sit
/// closer than the guard.
inline bool conflicts(const AngleEstimate &a, const AngleEstimate &b, double guard)
{
    const bool overlap = a.u_lo <= b.u_hi && b.u_lo <= a.u_hi;
    return overlap || angular_distance(a, b) < guard;
}

/// Greedy first-fit colouring in order of the interval lower edge.
inline GroupAssignment adma_group(std::span<const AngleEstimate> estimates, double guard = 0.0)
{
    require(guard >= 0.0, "adma_group: guard must be >= 0");
    std::vector<int> order(estimates.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return estimates[a].u_lo < estimates[b].u_lo; });

    GroupAssignment out;
    out.guard = guard;
    for (int k : order)
    {
        bool placed = false;
        for (auto &g : out.groups)
        {
            bool ok = true;
            for (int j : g)
                if (conflicts(estimates[k], estimates[j], guard))
                {
                    ok = false;
                    break;
                }
            if (ok)
            {
                g.push_back(k);
                placed = true;
                break;
            }
        }
        if (!placed)
            out.groups.push_back({k});
    }
    for (auto &g : out.groups)
        std::sort(g.begin(), g.end());
    return out;
}

/// One beamspace bin in cosine space, 2 pi / (M chi).
inline double default_reschedule_threshold(const ArrayConfig &cfg)
{
    return 2.0 * pi / (static_cast<double>(cfg.antennas) * cfg.chi(Link::uplink));
}

/// True when two members of the same group are now closer than `threshold`.
/// Overlapping or touching intervals always count as too close.
inline bool needs_reschedule(const GroupAssignment &current, std::span<const AngleEstimate> estimates,
                             double threshold)
{
    require(threshold >= 0.0, "needs_reschedule: threshold must be >= 0");
    for (const auto &g : current.groups)
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
            {
                require(static_cast<std::size_t>(g[a]) < estimates.size() &&
                            static_cast<std::size_t>(g[b]) < estimates.size(),
                        "needs_reschedule: user id out of range");
                const AngleEstimate &x = estimates[g[a]];
                const AngleEstimate &y = estimates[g[b]];
                if (conflicts(x, y, threshold))
                    return true;
            }
    return false;
}

} // namespace iccm

#endif
