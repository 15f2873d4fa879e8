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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "iccm/iccm.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

using namespace iccm;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double db(double x) { return 10.0 * std::log10(x); }

std::string fixed(double x, int digits = 3)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

/// Paired difference a - b across common trials.
Summary paired(const PointResult &pa, Method ma, const PointResult &pb, Method mb, Metric k)
{
    const auto xa = pa.samples(ma, k), xb = pb.samples(mb, k);
    std::vector<double> d(xa.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = xa[i] - xb[i];
    return summarize(d);
}

Summary paired(const PointResult &p, Method a, Method b, Metric k) { return paired(p, a, p, b, k); }

/// a exceeds b by more than one standard error of the paired difference.
bool above(const Summary &diff) { return diff.mean > diff.stderr_; }

double mean(const PointResult &p, Method m, Metric k) { return p.summary(m, k).mean; }

struct Report
{
    int failures = 0;
    void line(int id, bool ok, const std::string &what)
    {
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << std::endl;
        failures += ok ? 0 : 1;
    }
};

struct Runner
{
    unsigned workers = 1;
    std::string csv_dir;
    double elapsed = 0.0;

    SweepResult run(const std::string &name, const ScenarioConfig &c, const CcmObserver &observe = {})
    {
        const auto t0 = Clock::now();
        SweepResult r = run_sweep(c, workers, observe);
        const double dt = seconds_since(t0);
        elapsed += dt;
        std::cerr << "  [" << name << "] " << c.trials << " trials x " << r.points.size() << " points in "
                  << fixed(dt, 1) << " s\n";
        if (!csv_dir.empty())
            write_csv(r, csv_dir + "/" + name + ".csv");
        return r;
    }
};

// Users at 55, 90 and 125 degrees, L = 2M gains on the DTFT path.
ScenarioConfig base(std::uint64_t seed)
{
    ScenarioConfig c = default_scenario();
    c.training.grid_points = 256;
    c.seed = seed;
    return c;
}

void criterion_1(Report &rep, Runner &run)
{
    ScenarioConfig c = base(101);
    c.trials = 200;
    std::size_t ccms = 0, bad = 0;
    const auto t0 = Clock::now();
    const SweepResult r = run.run("c1_invariants", c, [&](const CcmEstimate &e) {
        ++ccms;
        if (!(hermitian_defect(e.matrix()) <= 1e-10 && e.min_relative_eigenvalue() >= -1e-10))
            ++bad;
    });
    const double dt = seconds_since(t0);
    run.elapsed -= dt; // not part of the sweep budget
    std::size_t eta_bad = 0, eta_count = 0;
    for (const auto &p : r.points)
        for (const auto &t : p.trials)
            for (Method m : c.methods)
                for (Metric k : {Metric::eta_ul, Metric::eta_dl})
                    if (metric_applies(m, k))
                    {
                        ++eta_count;
                        const double v = t(m, k);
                        eta_bad += (v >= 0.0 && v <= 1.0) ? 0 : 1;
                    }
    const PointContext ctx(c.at(0.0));
    double worst_norm = 0.0;
    for (const auto *set : {&ctx.steer_u, &ctx.steer_d})
        for (const CMatrix &s : *set)
            worst_norm = std::max(worst_norm, (s.colwise().norm().array() - 1.0).abs().maxCoeff());
    Rng rng(7);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int i = 0; i < 10000; ++i)
        worst_norm = std::max(worst_norm, std::abs(steering(c.array, Link::uplink, angle(rng)).norm() - 1.0));
    const bool ok = ccms > 0 && bad == 0 && eta_bad == 0 && worst_norm <= 1e-12 && dt < 60.0;
    rep.line(1, ok,
             std::to_string(ccms) + " CCMs, " + std::to_string(bad) + " not Hermitian PSD; " +
                 std::to_string(eta_bad) + " of " + std::to_string(eta_count) + " eta outside [0,1]; max |norm-1| " +
                 detail::fmt9(worst_norm) + "; " + fixed(dt, 1) + " s");
}

void criterion_2(Report &rep)
{
    const ArrayConfig cfg = ArrayConfig::half_wavelength(16, 2e9, 2.1e9);
    const PasModel model = PasModel::uniform(deg2rad(60.0), deg2rad(2.0));
    Rng rng(202);
    RaySet rays = build_rays(model, default_ray_count, rng);
    const CMatrix steer = steering_matrix(cfg, cfg.uplink_hz, rays.angles);
    CMatrix acc = CMatrix::Zero(16, 16);
    const int slots = 100000;
    for (int n = 0; n < slots; ++n)
    {
        rays = redraw_phases(std::move(rays), rng);
        const CVector h = steer * ray_coefficients(rays);
        acc.noalias() += h * h.adjoint();
    }
    const double sample_err = relative_frobenius(acc / slots, true_ccm(cfg, Link::uplink, model).matrix());

    bool ok = sample_err < 0.05;
    std::string detail = "sample covariance error " + fixed(sample_err, 4);
    for (PasKind kind : {PasKind::uniform, PasKind::laplacian})
    {
        std::vector<double> errs;
        for (double deg : {0.5, 1.0, 2.0, 5.0})
        {
            const PasModel m{kind, deg2rad(60.0), deg2rad(deg), {}, {}};
            errs.push_back(relative_frobenius(cf_iccm(cfg, Link::uplink, kind, m.mean, m.spread).matrix(),
                                              mc_iccm(cfg, Link::uplink, m, 4096).matrix()));
        }
        const bool monotone = errs[0] < errs[1] && errs[1] < errs[2] && errs[2] < errs[3];
        ok = ok && errs[2] < 0.05 && monotone;
        detail += std::string("; ") + std::string(to_string(kind)) + " closed-form error at 0.5/1/2/5 deg " +
                  fixed(errs[0], 5) + "/" + fixed(errs[1], 5) + "/" + fixed(errs[2], 5) + "/" + fixed(errs[3], 5);
    }
    rep.line(2, ok, detail);
}

void criterion_3(Report &rep)
{
    const ArrayConfig cfg = ArrayConfig::half_wavelength(128, 2e9, 2.1e9);
    const Index bin = 21;
    const double t0 = std::acos(-2.0 * pi * static_cast<double>(bin) / (128.0 * cfg.chi(Link::uplink)));
    const cd alpha = std::polar(1.7, 0.9);
    const CVector a = steering(cfg, Link::uplink, t0);
    const CVector h = alpha * a;

    const AngleEstimate e = estimate_angles(cfg, h, 1);
    const bool bin_ok = e.bins == std::vector<Index>{bin} && e.psi == 0.0;
    const GainGrid g = gains_dtft(cfg, h, 0.0, RVector::Constant(1, t0));
    const double gain_err = std::abs(g.gains(0) - alpha) / std::abs(alpha);
    const CcmEstimate r = ic_pccm(cfg, g);
    const CMatrix expected = std::norm(alpha) * a * a.adjoint();
    const double ccm_err = relative_frobenius(r.matrix(), expected);
    const Index rank = r.numerical_rank();
    const CcmEstimate truth(a * a.adjoint(), Link::uplink, CcmMethod::true_quadrature);
    const double eta = efficiency(truth, truncate(r, 1).vectors);
    const bool ok = bin_ok && gain_err < 1e-12 && ccm_err < 1e-12 && rank == 1 && std::abs(eta - 1.0) < 1e-12;
    rep.line(3, ok,
             std::string("bin ") + (bin_ok ? "recovered" : "missed") + ", gain error " + detail::fmt9(gain_err) +
                 ", CCM error " + detail::fmt9(ccm_err) + ", rank " + std::to_string(rank) + ", 1 - eta " +
                 detail::fmt9(1.0 - eta));
}

void criteria_4_5(Report &rep, Runner &run)
{
    ScenarioConfig c = base(404);
    c.trials = 200;
    c.methods = {Method::ic_pccm, Method::cf_iccm, Method::mc_iccm, Method::true_ccm};
    c.metrics = {Metric::eta_ul, Metric::eta_dl, Metric::rank};
    c.sweep = SweepVariable::spread;
    c.sweep_values = {2.0, 5.0, 10.0, 15.0, 20.0};
    const SweepResult uni = run.run("c4_spread_uniform", c);

    ScenarioConfig l = c;
    for (auto &u : l.users)
        u.kind = PasKind::laplacian;
    l.sweep_values = {10.0};
    const SweepResult lap = run.run("c4_spread_laplacian", l);

    std::vector<std::string> broken;
    std::string detail;
    for (const auto &p : uni.points)
    {
        for (Metric k : {Metric::eta_ul, Metric::eta_dl})
            for (Method other : {Method::cf_iccm, Method::mc_iccm})
                if (!above(paired(p, Method::ic_pccm, other, k)))
                    broken.push_back(std::string(to_string(k)) + " IC vs " + std::string(to_string(other)) + " at " +
                                     fixed(p.sweep_value, 0) + "deg");
        detail += (detail.empty() ? "" : ", ") + fixed(p.sweep_value, 0) + "deg IC/CF/MC ul " +
                  fixed(mean(p, Method::ic_pccm, Metric::eta_ul)) + "/" +
                  fixed(mean(p, Method::cf_iccm, Metric::eta_ul)) + "/" +
                  fixed(mean(p, Method::mc_iccm, Metric::eta_ul)) + " dl " +
                  fixed(mean(p, Method::ic_pccm, Metric::eta_dl)) + "/" +
                  fixed(mean(p, Method::cf_iccm, Metric::eta_dl)) + "/" +
                  fixed(mean(p, Method::mc_iccm, Metric::eta_dl));
    }
    const PointResult &u10 = uni.point(10.0);
    const PointResult &l10 = lap.point(10.0);
    std::string lap_detail;
    for (Method m : {Method::ic_pccm, Method::cf_iccm, Method::mc_iccm})
        for (Metric k : {Metric::eta_ul, Metric::eta_dl})
        {
            if (!above(paired(l10, m, u10, m, k)))
                broken.push_back(std::string(to_string(k)) + " Laplacian vs uniform for " +
                                 std::string(to_string(m)));
            lap_detail += (lap_detail.empty() ? "" : ", ") + std::string(to_string(m)) + " " +
                          std::string(to_string(k)) + " " + fixed(mean(l10, m, k)) + " vs " + fixed(mean(u10, m, k));
        }
    std::string failed;
    for (const auto &b : broken)
        failed += (failed.empty() ? "" : ", ") + b;
    rep.line(4, broken.empty(),
             (broken.empty() ? std::string("all orderings hold") : "orderings not beyond one SE: " + failed) + "; " +
                 detail + "; Laplacian vs uniform at 10deg: " + lap_detail);

    bool ok5 = true;
    std::string rank_detail;
    for (double as : {5.0, 10.0, 15.0})
    {
        const PointResult &p = uni.point(as);
        const double truth = mean(p, Method::true_ccm, Metric::rank);
        const double ic = mean(p, Method::ic_pccm, Metric::rank);
        const double cf = mean(p, Method::cf_iccm, Metric::rank);
        const double mc = mean(p, Method::mc_iccm, Metric::rank);
        ok5 = ok5 && std::abs(ic - truth) < std::abs(cf - truth) && std::abs(ic - truth) < std::abs(mc - truth);
        rank_detail += (rank_detail.empty() ? "" : ", ") + fixed(as, 0) + "deg true/IC/CF/MC " + fixed(truth, 1) +
                       "/" + fixed(ic, 1) + "/" + fixed(cf, 1) + "/" + fixed(mc, 1);
    }
    rep.line(5, ok5, "power ranks " + rank_detail);
}

void criterion_6(Report &rep, Runner &run)
{
    ScenarioConfig c = base(606);
    c.trials = 500;
    c.training.nu = 20;
    c.methods = {Method::true_ccm, Method::ic_pccm, Method::sbem};
    c.metrics = {Metric::nmse_ul};
    c.sweep = SweepVariable::spread;
    c.sweep_values = {5.0, 10.0, 15.0};
    const SweepResult r = run.run("c6_nmse_ul_spread", c);
    bool ok = true;
    std::string detail;
    for (const auto &p : r.points)
    {
        ok = ok && above(paired(p, Method::ic_pccm, Method::true_ccm, Metric::nmse_ul)) &&
             above(paired(p, Method::sbem, Method::ic_pccm, Metric::nmse_ul));
        detail += (detail.empty() ? "" : ", ") + fixed(p.sweep_value, 0) + "deg true/IC/SBEM " +
                  fixed(db(mean(p, Method::true_ccm, Metric::nmse_ul)), 2) + "/" +
                  fixed(db(mean(p, Method::ic_pccm, Metric::nmse_ul)), 2) + "/" +
                  fixed(db(mean(p, Method::sbem, Metric::nmse_ul)), 2) + " dB";
    }
    rep.line(6, ok, detail);
}

void criterion_7(Report &rep, Runner &run)
{
    ScenarioConfig c = base(707);
    c.trials = 200;
    c.training.nu = 16;
    for (auto &u : c.users)
        u.spread = deg2rad(10.0);
    c.methods = {Method::true_ccm, Method::ic_pccm, Method::sbem};
    c.metrics = {Metric::nmse_ul};
    c.sweep = SweepVariable::snr;
    c.sweep_values = {0.0, 10.0, 20.0, 30.0, 40.0};
    const SweepResult r = run.run("c7_nmse_ul_snr", c);
    const double s30 = db(mean(r.point(30.0), Method::sbem, Metric::nmse_ul));
    const double s40 = db(mean(r.point(40.0), Method::sbem, Metric::nmse_ul));
    const double i40 = db(mean(r.point(40.0), Method::ic_pccm, Metric::nmse_ul));
    const bool floor = std::abs(s30 - s40) < 1.0;
    const bool lower = s40 - i40 >= 2.0;
    std::string curve;
    for (const auto &p : r.points)
        curve += (curve.empty() ? "" : ", ") + fixed(p.sweep_value, 0) + "dB IC/SBEM " +
                 fixed(db(mean(p, Method::ic_pccm, Metric::nmse_ul)), 2) + "/" +
                 fixed(db(mean(p, Method::sbem, Metric::nmse_ul)), 2);
    rep.line(7, floor && lower,
             "SBEM 30->40 dB change " + fixed(s30 - s40, 2) + " dB (floor " + (floor ? "yes" : "no") +
                 "), IC floor below SBEM by " + fixed(s40 - i40, 2) + " dB; " + curve);
}

void criterion_8(Report &rep, Runner &run)
{
    ScenarioConfig c = base(808);
    c.trials = 200;
    c.training.nu = 20;
    for (auto &u : c.users)
        u.spread = deg2rad(10.0);
    c.methods = {Method::true_ccm, Method::ic_pccm, Method::sbem};
    c.metrics = {Metric::nmse_dl};
    c.sweep = SweepVariable::snr;
    c.sweep_values = {0.0, 10.0, 20.0, 30.0, 40.0};
    const SweepResult r = run.run("c8_nmse_dl_snr", c);
    const double drop = db(mean(r.point(0.0), Method::true_ccm, Metric::nmse_dl)) -
                        db(mean(r.point(40.0), Method::true_ccm, Metric::nmse_dl));
    bool no_floor = true;
    for (std::size_t i = 1; i < r.points.size(); ++i)
        no_floor = no_floor &&
                   above(paired(r.points[i - 1], Method::true_ccm, r.points[i], Method::true_ccm, Metric::nmse_dl));
    const double s30 = db(mean(r.point(30.0), Method::sbem, Metric::nmse_dl));
    const double s40 = db(mean(r.point(40.0), Method::sbem, Metric::nmse_dl));
    const bool flat = std::abs(s30 - s40) < 1.0;
    std::string curve;
    for (const auto &p : r.points)
        curve += (curve.empty() ? "" : ", ") + fixed(p.sweep_value, 0) + "dB true/SBEM " +
                 fixed(db(mean(p, Method::true_ccm, Metric::nmse_dl)), 2) + "/" +
                 fixed(db(mean(p, Method::sbem, Metric::nmse_dl)), 2);
    rep.line(8, drop >= 8.0 && no_floor && flat,
             "true-CCM drop " + fixed(drop, 2) + " dB, strictly decreasing " + (no_floor ? "yes" : "no") +
                 ", SBEM 30->40 dB change " + fixed(s30 - s40, 2) + " dB; " + curve);
}

void criterion_9(Report &rep, Runner &run)
{
    ScenarioConfig c = base(909);
    c.trials = 200;
    for (auto &u : c.users)
        u.spread = deg2rad(15.0);
    c.metrics = {Metric::nmse_dl};
    c.sweep = SweepVariable::nu;
    c.sweep_values = {8.0, 16.0, 24.0, 32.0, 48.0, 64.0};
    const SweepResult r = run.run("c9_nmse_dl_nu", c);
    bool monotone = true;
    std::string rising;
    for (Method m : c.methods)
        for (std::size_t i = 1; i < r.points.size(); ++i)
            if (above(paired(r.points[i], m, r.points[i - 1], m, Metric::nmse_dl)))
            {
                monotone = false;
                rising += std::string(rising.empty() ? "" : ", ") + std::string(to_string(m)) + " " +
                          fixed(r.points[i - 1].sweep_value, 0) + "->" + fixed(r.points[i].sweep_value, 0);
            }
    auto gap = [&](double nu) {
        const PointResult &p = r.point(nu);
        return std::abs(db(mean(p, Method::ic_pccm, Metric::nmse_dl)) - db(mean(p, Method::sbem, Metric::nmse_dl)));
    };
    const bool closer = gap(64.0) < gap(16.0);
    std::string curve;
    for (Method m : {Method::ic_pccm, Method::sbem, Method::true_ccm})
    {
        curve += (curve.empty() ? "" : "; ") + std::string(to_string(m));
        for (const auto &p : r.points)
            curve += " " + fixed(db(mean(p, m, Metric::nmse_dl)), 2);
    }
    rep.line(9, monotone && closer,
             std::string("non-increasing ") + (monotone ? "yes" : "no (rises: " + rising + ")") +
                 ", |IC-SBEM| at nu 16/64 " + fixed(gap(16.0), 2) + "/" + fixed(gap(64.0), 2) + " dB; dB over nu: " +
                 curve);
}

void criterion_10(Report &rep)
{
    ScenarioConfig c = base(1010);
    c.trials = 12;
    c.sweep = SweepVariable::spread;
    c.sweep_values = {4.0, 12.0};
    const std::string serial = to_csv(run_sweep(c, 1));
    const std::string parallel = to_csv(run_sweep(c, 8));
    rep.line(10, serial == parallel,
             std::string("1-worker and 8-worker CSV ") + (serial == parallel ? "identical" : "differ") + " (" +
                 std::to_string(serial.size()) + " bytes)");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance criteria for the iccm library"};
    Runner run;
    run.workers = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--workers", run.workers, "worker threads for the sweeps")->check(CLI::PositiveNumber);
    app.add_option("--csv-dir", run.csv_dir, "write every sweep CSV into this directory");
    CLI11_PARSE(app, argc, argv);
    if (!run.csv_dir.empty())
        std::filesystem::create_directories(run.csv_dir);

    std::cerr << "acceptance: " << run.workers << " worker(s)\n";
    Report rep;
    try
    {
        criterion_1(rep, run);
        criterion_2(rep);
        criterion_3(rep);
        criteria_4_5(rep, run);
        criterion_6(rep, run);
        criterion_7(rep, run);
        criterion_8(rep, run);
        criterion_9(rep, run);
        criterion_10(rep);
        rep.line(11, run.elapsed < 600.0,
                 "sweeps for criteria 4-9 took " + fixed(run.elapsed, 1) + " s on " + std::to_string(run.workers) +
                     " worker(s)");
    }
    catch (const std::exception &e)
    {
        std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
        return 100;
    }
    return rep.failures;
}
