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

#ifndef ICCM_EXPERIMENT_HPP
#define ICCM_EXPERIMENT_HPP

#include "iccm/ccm_reconstruction.hpp"
#include "iccm/downlink_estimation.hpp"
#include "iccm/metrics.hpp"
#include "iccm/scenario.hpp"
#include "iccm/scheduler.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace iccm
{

inline constexpr std::size_t method_count = 5;
inline constexpr std::size_t metric_count = 5;

inline std::size_t slot(Method m) { return static_cast<std::size_t>(m); }
inline std::size_t slot(Metric m) { return static_cast<std::size_t>(m); }

/// Per-trial metric values, averaged over users. NaN where not computed.
struct TrialResult
{
    std::array<std::array<double, metric_count>, method_count> value;

    TrialResult()
    {
        for (auto &row : value)
            row.fill(std::numeric_limits<double>::quiet_NaN());
    }

    double operator()(Method m, Metric k) const { return value[slot(m)][slot(k)]; }
};

/// Precomputed, read-only state of one sweep point, shared by all trials.
struct PointContext
{
    ScenarioConfig config;
    Index grid_points = 0;
    std::vector<RaySet> rays;      // angles and amplitudes; phases are redrawn
    std::vector<CMatrix> steer_u;  // M x R uplink responses of the rays
    std::vector<CMatrix> steer_d;  // same at the downlink carrier
    std::vector<CcmEstimate> true_u;
    std::vector<CcmEstimate> true_d; // scaled by mu

    explicit PointContext(ScenarioConfig cfg) : config(std::move(cfg))
    {
        config.validate();
        grid_points = config.training.resolved_grid_points(config.array.antennas);
        Rng unused(0);
        for (const PasModel &u : config.users)
        {
            RaySet r = build_rays(u, config.rays, unused);
            steer_u.push_back(steering_matrix(config.array, config.array.uplink_hz, r.angles));
            steer_d.push_back(steering_matrix(config.array, config.array.downlink_hz, r.angles));
            rays.push_back(std::move(r));
            true_u.push_back(true_ccm(config.array, Link::uplink, u, config.quadrature_points));
            true_d.push_back(true_ccm(config.array, Link::downlink, u, config.quadrature_points).scaled(config.mu));
        }
    }
};

/// Receives every CCM estimate a trial builds.
using CcmObserver = std::function<void(const CcmEstimate &)>;

namespace detail
{

inline CVector draw_channel(const CMatrix &steer, const RaySet &rays, double scale, Rng &rng)
{
    CVector c(rays.size());
    for (Index r = 0; r < rays.size(); ++r)
        c(r) = std::polar(scale * rays.amplitudes(r), uniform_phase(rng));
    return steer * c;
}

/// Beamspace CCM of an SBEM estimate: the kept bins' powers placed at the
/// bin centres.
inline CcmEstimate beamspace_ccm(const ArrayConfig &cfg, const CVector &h_sbem, const AngleEstimate &est, Link link,
                                 double scale)
{
    const CVector c = beamspace(h_sbem, est.psi);
    RVector steps(est.kappa()), powers(est.kappa());
    for (Index i = 0; i < est.kappa(); ++i)
    {
        const Index q = est.bins[static_cast<std::size_t>(i)];
        steps(i) = cfg.chi(link) * std::clamp(bin_center(cfg, est.psi, q), -1.0, 1.0);
        powers(i) = scale * std::norm(c(q));
    }
    return CcmEstimate(ula_covariance(cfg.antennas, steps, powers), link, CcmMethod::beamspace);
}

} // namespace detail

/// One Monte Carlo trial of the full two-slot pipeline. Deterministic in
/// (config.seed, trial).
inline TrialResult run_trial(const PointContext &ctx, std::uint64_t trial, const CcmObserver &observe = {})
{
    const ScenarioConfig &cfg = ctx.config;
    const ArrayConfig &arr = cfg.array;
    const TrainingConfig &tr = cfg.training;
    const std::size_t users = cfg.users.size();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, trial);
    Rng rng(trial_seed);

    // Slot n-1: preamble, angle acquisition, grouping.
    std::vector<AngleEstimate> previous(users);
    for (std::size_t k = 0; k < users; ++k)
    {
        const CVector h0 = detail::draw_channel(ctx.steer_u[k], ctx.rays[k], 1.0, rng);
        previous[k] = estimate_angles(arr, ls_preamble(h0, tr.rho_u, rng), tr.kappa, cfg.rotation_grid);
    }
    const GroupAssignment groups = adma_group(previous, cfg.guard);

    // Slot n: fresh phases on both links.
    std::vector<CVector> h(users), hd(users), hs(users);
    for (std::size_t k = 0; k < users; ++k)
    {
        h[k] = detail::draw_channel(ctx.steer_u[k], ctx.rays[k], 1.0, rng);
        hd[k] = detail::draw_channel(ctx.steer_d[k], ctx.rays[k], std::sqrt(cfg.mu), rng);
    }
    for (const auto &g : groups.groups)
    {
        std::vector<CVector> members;
        for (int k : g)
            members.push_back(h[static_cast<std::size_t>(k)]);
        const CVector obs = group_observation(members, tr.rho_u, rng);
        for (int k : g)
        {
            const AngleEstimate &e = previous[static_cast<std::size_t>(k)];
            hs[static_cast<std::size_t>(k)] = sbem_estimate(obs, e.psi, e.bins);
        }
    }

    // Angle update and gains from the SBEM estimate. Gains are taken in the
    // unrotated frame because the grid already holds physical angles.
    std::vector<AngleEstimate> current(users);
    std::vector<GainGrid> grids(users);
    const bool need_grid = cfg.has(Method::ic_pccm) || cfg.has(Method::cf_iccm) || cfg.has(Method::mc_iccm);
    for (std::size_t k = 0; k < users; ++k)
    {
        if (!need_grid)
            break;
        current[k] = estimate_angles(arr, hs[k], tr.kappa, cfg.rotation_grid);
        if (cfg.has(Method::ic_pccm))
            grids[k] = estimate_gains(arr, hs[k], 0.0,
                                      angle_grid(current[k].mean, current[k].spread, ctx.grid_points));
    }

    const bool need_ul = cfg.has(Metric::eta_ul) || cfg.has(Metric::nmse_ul) || cfg.has(Metric::rank);
    const bool need_dl = cfg.has(Metric::eta_dl) || cfg.has(Metric::nmse_dl);

    TrialResult out;
    for (Method method : cfg.methods)
    {
        std::vector<CcmEstimate> ru, rd;
        for (std::size_t k = 0; k < users; ++k)
        {
            const PasKind kind = cfg.users[k].kind;
            const PasModel fitted{kind, current[k].mean, current[k].spread, {}, {}};
            switch (method)
            {
            case Method::true_ccm:
                ru.push_back(ctx.true_u[k]);
                rd.push_back(ctx.true_d[k]);
                break;
            case Method::ic_pccm:
                if (need_ul)
                    ru.push_back(ic_pccm(arr, grids[k]));
                if (need_dl)
                    rd.push_back(infer_downlink(arr, grids[k], cfg.mu));
                break;
            case Method::cf_iccm:
                if (need_ul)
                    ru.push_back(cf_iccm(arr, Link::uplink, kind, fitted.mean, fitted.spread));
                if (need_dl)
                    rd.push_back(cf_iccm(arr, Link::downlink, kind, fitted.mean, fitted.spread).scaled(cfg.mu));
                break;
            case Method::mc_iccm:
                if (need_ul)
                    ru.push_back(mc_iccm(arr, Link::uplink, fitted, cfg.quadrature_points));
                if (need_dl)
                    rd.push_back(mc_iccm(arr, Link::downlink, fitted, cfg.quadrature_points).scaled(cfg.mu));
                break;
            case Method::sbem:
                if (need_dl)
                    rd.push_back(detail::beamspace_ccm(arr, hs[k], previous[k], Link::downlink, cfg.mu));
                break;
            }
        }
        if (observe)
        {
            for (const auto &r : ru)
                observe(r);
            for (const auto &r : rd)
                observe(r);
        }

        std::array<double, metric_count> sum{};
        for (std::size_t k = 0; k < users; ++k)
        {
            const auto &group = groups.groups[static_cast<std::size_t>(groups.group_of(static_cast<int>(k)))];
            for (Metric metric : cfg.metrics)
            {
                if (!metric_applies(method, metric))
                    continue;
                double v = 0.0;
                switch (metric)
                {
                case Metric::eta_ul: v = efficiency(ctx.true_u[k], truncate(ru[k], tr.nu).vectors); break;
                case Metric::eta_dl: v = efficiency(ctx.true_d[k], truncate(rd[k], tr.nu).vectors); break;
                case Metric::rank: v = static_cast<double>(ru[k].power_rank()); break;
                case Metric::nmse_ul:
                    if (method == Method::sbem)
                        v = nmse(h[k], hs[k]);
                    else
                    {
                        std::vector<CcmEstimate> members;
                        for (int j : group)
                            members.push_back(ru[static_cast<std::size_t>(j)]);
                        v = nmse(h[k], mmse_uplink(hs[k], ru[k], members, tr.rho_u, tr.nu, cfg.mmse_mode));
                    }
                    break;
                case Metric::nmse_dl:
                {
                    std::vector<Beamformer> beams;
                    std::size_t owner = 0;
                    for (int j : group)
                    {
                        if (j == static_cast<int>(k))
                            owner = beams.size();
                        beams.push_back(eigen_beamformer(rd[static_cast<std::size_t>(j)], tr.nu, j));
                    }
                    // identical feedback noise for every method
                    Rng noise = make_rng(trial_seed, k + 1);
                    const CVector obs = downlink_training(hd[k], beams, tr.rho_d, noise);
                    v = nmse(hd[k], mmse_downlink(obs, rd[k], beams, tr.rho_d, cfg.mmse_mode, owner));
                    break;
                }
                }
                sum[slot(metric)] += v;
            }
        }
        for (Metric metric : cfg.metrics)
            if (metric_applies(method, metric))
                out.value[slot(method)][slot(metric)] = sum[slot(metric)] / static_cast<double>(users);
    }
    return out;
}

/// All trials of one sweep point, in trial order.
struct PointResult
{
    double sweep_value = 0.0;
    ScenarioConfig config;
    Index grid_points = 0;
    std::vector<TrialResult> trials;

    std::vector<double> samples(Method m, Metric k) const
    {
        std::vector<double> xs;
        xs.reserve(trials.size());
        for (const auto &t : trials)
            xs.push_back(t(m, k));
        return xs;
    }

    Summary summary(Method m, Metric k) const
    {
        const auto xs = samples(m, k);
        return summarize(xs);
    }
};

struct MetricsRecord
{
    Method method;
    Metric metric;
    double sweep_value;
    Summary summary;
};

struct SweepResult
{
    ScenarioConfig config;
    std::vector<PointResult> points;

    std::vector<MetricsRecord> records() const
    {
        std::vector<MetricsRecord> out;
        for (const auto &p : points)
            for (Method m : config.methods)
                for (Metric k : config.metrics)
                    if (metric_applies(m, k))
                        out.push_back({m, k, p.sweep_value, p.summary(m, k)});
        return out;
    }

    const PointResult &point(double value) const
    {
        for (const auto &p : points)
            if (p.sweep_value == value)
                return p;
        throw ContractViolation("sweep has no point at the requested value");
    }
};

/// Run every (point, trial) pair on `workers` threads. The result does not
/// depend on the worker count.
inline SweepResult run_sweep(const ScenarioConfig &config, unsigned workers = 1, const CcmObserver &observe = {})
{
    config.validate();
    SweepResult result{config, {}};
    std::vector<PointContext> contexts;
    for (double v : config.points())
    {
        contexts.emplace_back(config.at(v));
        PointResult p;
        p.sweep_value = v;
        p.config = contexts.back().config;
        p.grid_points = contexts.back().grid_points;
        p.trials.resize(config.trials);
        result.points.push_back(std::move(p));
    }

    const std::size_t per_point = config.trials;
    const std::size_t jobs = per_point * contexts.size();
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::mutex observe_mutex;
    CcmObserver locked_observer;
    if (observe)
        locked_observer = [&](const CcmEstimate &r) {
            std::lock_guard lock(observe_mutex);
            observe(r);
        };

    auto work = [&] {
        for (;;)
        {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs)
                return;
            {
                std::lock_guard lock(error_mutex);
                if (error)
                    return;
            }
            const std::size_t p = job / per_point;
            const std::size_t t = job % per_point;
            try
            {
                result.points[p].trials[t] = run_trial(contexts[p], t, locked_observer);
            }
            catch (const std::exception &e)
            {
                std::ostringstream msg;
                msg << "trial " << t << " at " << to_string(config.sweep) << " = " << result.points[p].sweep_value
                    << ": " << e.what();
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::make_exception_ptr(std::runtime_error(msg.str()));
            }
        }
    };

    workers = std::max(1u, workers);
    if (workers == 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back(work);
        for (auto &th : pool)
            th.join();
    }
    if (error)
        std::rethrow_exception(error);
    return result;
}

namespace detail
{

inline std::string fmt9(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

} // namespace detail

inline constexpr const char *csv_header =
    "method,sweep_name,sweep_value,metric,mean,stderr,trials,M,f_u_hz,f_d_hz,snr_db,nu,kappa,L,pas_kind,as_deg,seed";

inline std::string to_csv(const SweepResult &r)
{
    std::ostringstream os;
    os << csv_header << '\n';
    for (const auto &p : r.points)
    {
        const ScenarioConfig &c = p.config;
        std::string kind(to_string(c.users.front().kind));
        for (const auto &u : c.users)
            if (u.kind != c.users.front().kind)
                kind = "mixed";
        for (Method m : r.config.methods)
            for (Metric k : r.config.metrics)
            {
                if (!metric_applies(m, k))
                    continue;
                const Summary s = p.summary(m, k);
                os << to_string(m) << ',' << to_string(r.config.sweep) << ',' << detail::fmt9(p.sweep_value) << ','
                   << to_string(k) << ',' << detail::fmt9(s.mean) << ',' << detail::fmt9(s.stderr_) << ','
                   << s.count << ',' << c.array.antennas << ',' << detail::fmt9(c.array.uplink_hz) << ','
                   << detail::fmt9(c.array.downlink_hz) << ',' << detail::fmt9(c.snr_db.front()) << ','
                   << c.training.nu << ',' << c.training.kappa << ',' << p.grid_points << ',' << kind << ','
                   << detail::fmt9(rad2deg(c.users.front().spread)) << ',' << c.seed << '\n';
            }
    }
    return os.str();
}

inline void write_csv(const SweepResult &r, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << to_csv(r);
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace iccm

#endif
