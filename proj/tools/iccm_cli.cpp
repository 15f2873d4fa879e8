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

// Command-line front end: run one scenario, run a sweep, or self-test.

#include "iccm/iccm.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

int main(int argc, char **argv)
{
    CLI::App app{"Covariance-aided channel estimation experiments for TDD/FDD massive MIMO"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the configured master seed");

    std::string config_path, out_path;
    auto *run = app.add_subcommand("run", "evaluate the base scenario of a config (sweep ignored)");
    run->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "CSV output path")->required();
    auto *sweep = app.add_subcommand("sweep", "evaluate every point of the configured sweep");
    sweep->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_path, "CSV output path")->required();
    auto *selftest = app.add_subcommand("selftest", "run the invariant checks");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (selftest->parsed())
            return iccm::selftest(std::cout) == 0 ? 0 : 1;

        iccm::ScenarioConfig cfg = iccm::load_scenario(config_path);
        if (seed)
            cfg.seed = *seed;
        if (run->parsed())
        {
            cfg.sweep = iccm::SweepVariable::none;
            cfg.sweep_values.clear();
        }
        else
            iccm::require(cfg.sweep != iccm::SweepVariable::none, "sweep: config has no sweep variable");
        const iccm::SweepResult result = iccm::run_sweep(cfg, workers);
        iccm::write_csv(result, out_path);
    }
    catch (const std::exception &e)
    {
        std::cerr << "iccm: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
