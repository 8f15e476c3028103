// SPDX-License-Identifier: Apache-2.0
//
// mmwloc: position and orientation estimation from a single mm-wave MIMO transmitter
// Copyright (C) 2026 The mmwloc Authors
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

// Command-line front end: bound sweeps, single estimation runs and Monte Carlo campaigns.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "mmwloc/records.hpp"

using namespace mmwloc;

namespace
{

struct Common
{
    std::string profile = "desk";
    std::string config;
    std::string out = "out";
};

CampaignConfig resolve(const Common &c)
{
    CampaignConfig base = profile_by_name(c.profile);
    if (c.config.empty())
    {
        base.validate();
        return base;
    }
    return load_campaign(c.config, base);
}

void save_config(const std::filesystem::path &dir, const CampaignConfig &cfg)
{
    write_file(dir, "config.json", [&](std::ostream &os) { os << campaign_to_json(cfg).dump(2) << '\n'; });
}

void run_bounds_command(const Common &c)
{
    const CampaignConfig cfg = resolve(c);
    const BoundsResult b = run_bounds(cfg);
    save_config(c.out, cfg);
    write_file(c.out, "bounds.csv", [&](std::ostream &os) { write_bounds_csv(os, b); });
    write_file(c.out, "bounds_summary.csv", [&](std::ostream &os) { write_bounds_summary_csv(os, b); });
    for (const auto &row : b.summary)
        std::printf("G=%-3d snr=%6.1f dB  peb90=%.4g m  reb90=%.4g rad  singular=%d\n", row.beams, row.snr_db,
                    row.peb_q90, row.reb_q90, row.n_singular);
}

void run_estimate_command(const Common &c, std::uint64_t seed, std::optional<double> snr)
{
    CampaignConfig cfg = resolve(c);
    cfg.base_seed = seed;
    cfg.estimator.sage.record_trajectory = true;
    const double snr_db = snr.value_or(cfg.snr_db.front());

    PipelineResult res;
    ChannelParamSet truth;
    const TrialRecord rec = run_trial(cfg, snr_db, 0, &res, &truth);
    save_config(c.out, cfg);
    write_file(c.out, "trials.csv", [&](std::ostream &os) { write_trials_csv(os, {rec}); });
    if (rec.status != TrialStatus::Failed)
    {
        write_file(c.out, "estimate.csv", [&](std::ostream &os) { write_estimate_csv(os, truth, res.channel); });
        write_file(c.out, "trajectory.csv",
                   [&](std::ostream &os) { write_trajectory_csv(os, res.channel.refined); });
    }
    std::printf("snr=%.1f dB status=%s paths=%d/%d branch=%s\n", snr_db, to_string(rec.status), rec.k_hat,
                rec.k_true, rec.branch.c_str());
    if (rec.status == TrialStatus::Failed)
        std::printf("failure: %s\n", rec.failure.c_str());
    else
        std::printf("p=(%.6f, %.6f) alpha=%.6f  |dp|=%.4g m (peb %.4g)  |dalpha|=%.4g rad (reb %.4g)\n",
                    rec.pose.position.x, rec.pose.position.y, rec.pose.rotation, rec.err_p, rec.peb, rec.err_alpha,
                    rec.reb);
}

void run_montecarlo_command(const Common &c, std::optional<int> trials, std::optional<std::uint64_t> seed)
{
    CampaignConfig cfg = resolve(c);
    if (trials)
        cfg.n_trials = *trials;
    if (seed)
        cfg.base_seed = *seed;
    cfg.validate();
    const MonteCarloResult mc = run_montecarlo(cfg);
    save_config(c.out, cfg);
    write_file(c.out, "trials.csv", [&](std::ostream &os) { write_trials_csv(os, mc.records); });
    write_file(c.out, "summary.csv", [&](std::ostream &os) { write_summary_csv(os, mc.summary); });
    write_file(c.out, "cdf.csv", [&](std::ostream &os) { write_cdf_csv(os, mc.records); });
    for (const auto &row : mc.summary)
        std::printf("snr=%6.1f dB ok=%d/%d  rmse_p=%.4g m (all %.4g) peb=%.4g m  rmse_alpha=%.4g rad reb=%.4g rad\n",
                    row.snr_db, row.n_ok, row.n_trials, row.rmse_p_m, row.rmse_p_all_m, row.peb_m,
                    row.rmse_alpha_rad, row.reb_rad);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mmwloc: mm-wave position and orientation bounds and estimators"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--profile", common.profile, "base configuration")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    app.fallthrough();

    auto add_io = [&](CLI::App *sub) {
        sub->add_option("--config", common.config, "campaign JSON (keys override the profile)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
    };

    CLI::App *bounds = app.add_subcommand("bounds", "PEB/REB sweep over SNR, positions and beam counts");
    add_io(bounds);

    CLI::App *estimate = app.add_subcommand("estimate", "one synthesized observation through the estimator");
    add_io(estimate);
    std::uint64_t seed = 1;
    std::optional<double> snr;
    estimate->add_option("--seed", seed, "base seed")->capture_default_str();
    estimate->add_option("--snr", snr, "SNR [dB]; defaults to the first configured value");

    CLI::App *montecarlo = app.add_subcommand("montecarlo", "Monte Carlo campaign over the SNR grid");
    add_io(montecarlo);
    std::optional<int> trials;
    std::optional<std::uint64_t> mc_seed;
    montecarlo->add_option("--trials", trials, "trials per SNR")->check(CLI::PositiveNumber);
    montecarlo->add_option("--seed", mc_seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*bounds)
            run_bounds_command(common);
        else if (*estimate)
            run_estimate_command(common, seed, snr);
        else
            run_montecarlo_command(common, trials, mc_seed);
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
