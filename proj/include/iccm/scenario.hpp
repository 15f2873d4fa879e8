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

#ifndef ICCM_SCENARIO_HPP
#define ICCM_SCENARIO_HPP

#include "iccm/channel_synthesis.hpp"
#include "iccm/uplink_estimation.hpp"

#include "json.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace iccm
{

enum class Method
{
    ic_pccm,
    cf_iccm,
    mc_iccm,
    true_ccm,
    sbem
};

inline constexpr Method all_methods[] = {Method::ic_pccm, Method::cf_iccm, Method::mc_iccm, Method::true_ccm,
                                         Method::sbem};

inline std::string_view to_string(Method m)
{
    switch (m)
    {
    case Method::ic_pccm: return "IC-pCCM";
    case Method::cf_iccm: return "CF-iCCM";
    case Method::mc_iccm: return "MC-iCCM";
    case Method::true_ccm: return "TrueCCM";
    case Method::sbem: return "SBEM";
    }
    return "?";
}

inline Method method_from_string(std::string_view s)
{
    for (Method m : all_methods)
        if (to_string(m) == s)
            return m;
    throw ContractViolation("unknown method '" + std::string(s) + "'");
}

enum class Metric
{
    eta_ul,
    eta_dl,
    nmse_ul,
    nmse_dl,
    rank
};

inline constexpr Metric all_metrics[] = {Metric::eta_ul, Metric::eta_dl, Metric::nmse_ul, Metric::nmse_dl,
                                         Metric::rank};

inline std::string_view to_string(Metric m)
{
    switch (m)
    {
    case Metric::eta_ul: return "eta_ul";
    case Metric::eta_dl: return "eta_dl";
    case Metric::nmse_ul: return "nmse_ul";
    case Metric::nmse_dl: return "nmse_dl";
    case Metric::rank: return "rank";
    }
    return "?";
}

inline Metric metric_from_string(std::string_view s)
{
    for (Metric m : all_metrics)
        if (to_string(m) == s)
            return m;
    throw ContractViolation("unknown metric '" + std::string(s) + "'");
}

/// SBEM builds no CCM, so only the NMSE metrics exist for it.
inline bool metric_applies(Method method, Metric metric)
{
    return method != Method::sbem || metric == Metric::nmse_ul || metric == Metric::nmse_dl;
}

enum class SweepVariable
{
    none,
    snr,
    spread,
    nu
};

inline std::string_view to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::none: return "none";
    case SweepVariable::snr: return "snr";
    case SweepVariable::spread: return "spread";
    case SweepVariable::nu: return "nu";
    }
    return "?";
}

inline SweepVariable sweep_from_string(std::string_view s)
{
    for (SweepVariable v : {SweepVariable::none, SweepVariable::snr, SweepVariable::spread, SweepVariable::nu})
        if (to_string(v) == s)
            return v;
    throw ContractViolation("unknown sweep variable '" + std::string(s) + "'");
}

/// Everything one Monte Carlo experiment needs. Angles are radians here;
/// the JSON form uses degrees.
struct ScenarioConfig
{
    ArrayConfig array = ArrayConfig::half_wavelength(128, 2e9, 2.1e9);
    std::vector<PasModel> users;
    TrainingConfig training;
    std::vector<Method> methods{all_methods, all_methods + 5};
    std::vector<Metric> metrics{all_metrics, all_metrics + 5};
    std::vector<double> snr_db{10.0};
    SweepVariable sweep = SweepVariable::none;
    std::vector<double> sweep_values; // dB, degrees or counts
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    double mu = 1.0;
    Index quadrature_points = default_quadrature_points;
    Index rotation_grid = default_rotation_grid;
    Index rays = default_ray_count;
    double guard = 0.0;
    MmseMode mmse_mode = MmseMode::full;

    bool has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
    bool has(Metric m) const { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); }

    void validate() const
    {
        array.validate();
        require(!users.empty(), "scenario: at least one user required");
        for (const auto &u : users)
        {
            u.validate();
            require(u.kind != PasKind::tabulated || (!has(Method::cf_iccm) && !has(Method::mc_iccm)),
                    "scenario: CF-iCCM and MC-iCCM need a parametric PAS");
        }
        training.validate(array.antennas);
        require(trials >= 1, "scenario: trials must be >= 1");
        require(!methods.empty(), "scenario: at least one method required");
        require(!metrics.empty(), "scenario: at least one metric required");
        require(!snr_db.empty(), "scenario: SNR grid must be non-empty");
        require(mu > 0.0, "scenario: mu must be positive");
        require(quadrature_points >= 2 && rotation_grid >= 1 && rays >= 1, "scenario: bad numerical settings");
        require(guard >= 0.0, "scenario: guard must be >= 0");
    }

    /// Sweep points; a single point holding the base value when not sweeping.
    std::vector<double> points() const
    {
        if (sweep == SweepVariable::none)
            return {0.0};
        if (!sweep_values.empty())
            return sweep_values;
        if (sweep == SweepVariable::snr)
            return snr_db;
        throw ContractViolation("scenario: sweep values missing");
    }

    /// Copy with the sweep variable set to `value`.
    ScenarioConfig at(double value) const
    {
        ScenarioConfig c = *this;
        c.snr_db = {snr_db.front()};
        switch (sweep)
        {
        case SweepVariable::none: break;
        case SweepVariable::snr: c.snr_db = {value}; break;
        case SweepVariable::spread:
            for (auto &u : c.users)
                u.spread = deg2rad(value);
            break;
        case SweepVariable::nu:
            require(value >= 1.0 && value == std::floor(value), "scenario: nu sweep values must be integers");
            c.training.nu = static_cast<Index>(value);
            break;
        }
        c.sweep = SweepVariable::none;
        c.sweep_values.clear();
        const double rho = db_to_linear(c.snr_db.front());
        c.training.rho_u = rho;
        c.training.rho_d = rho;
        c.validate();
        return c;
    }
};

/// The default scenario: M = 128, 2 GHz uplink, 100 MHz duplex gap,
/// half-wavelength spacing, kappa = nu = 16, 10 dB.
inline ScenarioConfig default_scenario()
{
    ScenarioConfig c;
    for (double deg : {55.0, 90.0, 125.0})
        c.users.push_back(PasModel::uniform(deg2rad(deg), deg2rad(5.0)));
    c.training.rho_u = c.training.rho_d = db_to_linear(10.0);
    return c;
}

namespace detail
{

template <typename T>
void read_opt(const nlohmann::json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace detail

/// Parse a scenario from JSON. Unknown keys are rejected.
inline ScenarioConfig scenario_from_json(const nlohmann::json &j)
{
    static const char *known[] = {"array",  "users", "training", "methods",    "metrics", "snr_db",
                                  "sweep",  "trials", "seed",    "mu",         "quadrature_points",
                                  "rotation_grid",    "rays",    "guard",      "mmse_mode"};
    for (const auto &[key, _] : j.items())
        require(std::find_if(std::begin(known), std::end(known), [&](const char *k) { return key == k; }) !=
                    std::end(known),
                "config: unknown key '" + key + "'");

    ScenarioConfig c = default_scenario();
    if (j.contains("array"))
    {
        const auto &a = j.at("array");
        Index m = c.array.antennas;
        double fu = c.array.uplink_hz, fd = c.array.downlink_hz;
        detail::read_opt(a, "antennas", m);
        detail::read_opt(a, "uplink_hz", fu);
        detail::read_opt(a, "downlink_hz", fd);
        c.array = ArrayConfig::half_wavelength(m, fu, fd);
        detail::read_opt(a, "spacing_m", c.array.spacing);
        detail::read_opt(a, "speed_mps", c.array.c);
    }
    if (j.contains("users"))
    {
        c.users.clear();
        for (const auto &u : j.at("users"))
        {
            const PasKind kind = pas_kind_from_string(u.value("pas", std::string("uniform")));
            require(kind != PasKind::tabulated || u.contains("table_deg"), "config: tabulated PAS needs table_deg");
            PasModel p{kind, deg2rad(u.at("mean_deg").get<double>()), deg2rad(u.at("spread_deg").get<double>()), {},
                       {}};
            if (kind == PasKind::tabulated)
            {
                auto deg = u.at("table_deg").get<std::vector<double>>();
                auto dens = u.at("table_density").get<std::vector<double>>();
                p.table_angles = Eigen::Map<RVector>(deg.data(), static_cast<Index>(deg.size())) * (pi / 180.0);
                // density per degree in the file, per radian inside
                p.table_density = Eigen::Map<RVector>(dens.data(), static_cast<Index>(dens.size())) * (180.0 / pi);
            }
            c.users.push_back(std::move(p));
        }
    }
    if (j.contains("training"))
    {
        const auto &t = j.at("training");
        detail::read_opt(t, "kappa", c.training.kappa);
        detail::read_opt(t, "nu", c.training.nu);
        detail::read_opt(t, "L", c.training.grid_points);
    }
    if (j.contains("methods"))
    {
        c.methods.clear();
        for (const auto &m : j.at("methods"))
            c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (j.contains("metrics"))
    {
        c.metrics.clear();
        for (const auto &m : j.at("metrics"))
            c.metrics.push_back(metric_from_string(m.get<std::string>()));
    }
    if (j.contains("snr_db"))
    {
        const auto &s = j.at("snr_db");
        c.snr_db = s.is_array() ? s.get<std::vector<double>>() : std::vector<double>{s.get<double>()};
    }
    if (j.contains("sweep"))
    {
        const auto &s = j.at("sweep");
        c.sweep = sweep_from_string(s.at("variable").get<std::string>());
        detail::read_opt(s, "values", c.sweep_values);
    }
    detail::read_opt(j, "trials", c.trials);
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "mu", c.mu);
    detail::read_opt(j, "quadrature_points", c.quadrature_points);
    detail::read_opt(j, "rotation_grid", c.rotation_grid);
    detail::read_opt(j, "rays", c.rays);
    detail::read_opt(j, "guard", c.guard);
    if (j.contains("mmse_mode"))
    {
        const auto mode = j.at("mmse_mode").get<std::string>();
        require(mode == "full" || mode == "asymptotic", "config: mmse_mode must be 'full' or 'asymptotic'");
        c.mmse_mode = mode == "full" ? MmseMode::full : MmseMode::asymptotic;
    }
    const double rho = db_to_linear(c.snr_db.front());
    c.training.rho_u = c.training.rho_d = rho;
    c.validate();
    return c;
}

inline ScenarioConfig load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::runtime_error("config '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace iccm

#endif
