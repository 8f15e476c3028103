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

// Acceptance checks. Each criterion prints one line:
//   criterion <n> <PASS|FAIL> <name>: <measured values>
// and the process exits non-zero if any selected criterion fails.

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "mmwloc/campaign.hpp"
#include "oracle.hpp"
#include "properties.hpp"

using namespace mmwloc;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Entry-wise error normalized by sqrt(J_rr J_ss), so delay and angle entries are comparable.
double max_normalized_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &ref)
{
    double worst = 0.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            worst = std::max(worst, std::abs(a(r, c) - ref(r, c)) / std::sqrt(std::abs(ref(r, r) * ref(c, c))));
    return worst;
}

Outcome fim_oracle()
{
    ArrayOfdmConfig cfg;
    cfg.n_tx = cfg.n_rx = 4;
    cfg.n_subcarriers = 4;
    cfg.n_transmissions = 2;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i)
    {
        const Scenario s = oracle::random_scenario(rng, i % 2, false);
        const ChannelParamSet cp = params_from_scenario(s, oracle::random_gains(rng, s.path_count()));
        const PilotBlock pilots = random_pilots(cfg, rng());
        const double n0 = 0.01;
        const Eigen::MatrixXd fd = oracle::fim_finite_difference(cp, cfg, pilots, n0);
        worst = std::max(worst, max_normalized_error(fim_channel_params(cp, cfg, pilots, n0).entries, fd));
    }
    return {worst < 1e-4, fmt("50 configs, max normalized entry error %.3g (limit 1e-4)", worst)};
}

Outcome jacobian_oracle()
{
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const bool olos = i % 4 == 3;
        const Scenario s = oracle::random_scenario(rng, olos ? 3 : i % 4, olos);
        const LocationParams loc = location_from_scenario(s, oracle::random_gains(rng, s.path_count()));
        const Eigen::MatrixXd T = transformation_matrix(loc, s.bs);
        const Eigen::MatrixXd fd =
            oracle::jacobian_finite_difference(location_vector(loc), olos, s.bs, kLightSpeed, 1e-6);
        Eigen::MatrixXd diff = T - fd;
        for (Eigen::Index c = 0; c < diff.cols(); c += 5)
            diff.col(c) *= kLightSpeed; // delay in metres
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return {worst < 1e-6, fmt("100 scenarios, max abs error %.3g (limit 1e-6)", worst)};
}

Outcome efim_fidelity()
{
    const ArrayOfdmConfig cfg = paper_profile().array;
    Scenario s;
    s.ms = {4.0, 0.0};
    s.rotation = 0.1;
    s.scatterers = {{1.5, 0.4}};
    const PilotBlock pilots = random_pilots(cfg, 7);
    const std::vector<cdouble> gains = draw_gains(s, cfg, {}, 8);
    const double n0 = noise_psd_for_snr(params_from_scenario(s, gains), cfg, pilots, 0.0);
    const double exact = scenario_bounds(s, gains, cfg, pilots, n0).peb;
    const double approx = position_error_bound(efim_position_rotation(s, gains, cfg, pilots, n0));
    const double rel = std::abs(approx - exact) / exact;
    return {rel < 0.05, fmt("exact PEB %.4g m, approximate %.4g m, difference %.2f%% (limit 5%%)", exact, approx,
                            100.0 * rel)};
}

Outcome noiseless_end_to_end()
{
    struct Case
    {
        Vec2 ms;
        double rotation;
        std::vector<Vec2> scatterers;
    };
    const std::vector<Case> cases{
        {{4.0, 0.0}, 0.1, {}},
        {{3.1, 0.23}, 0.07, {}},
        {{2.6, -0.7}, -0.2, {}},
        {{4.0, 0.0}, 0.1, {{1.5, 0.4}}},
        {{3.3, 0.4}, 0.15, {{1.2, -0.5}}},
        {{2.8, -0.3}, 0.05, {{1.5, 0.9}, {2.0, -0.8}}},
    };
    const ArrayOfdmConfig cfg = desk_profile().array;
    const EstimatorConfig ec;
    double worst_p = 0.0, worst_a = 0.0;
    std::string failure;
    std::uint64_t seed = 31;
    for (const auto &c : cases)
    {
        Scenario s;
        s.ms = c.ms;
        s.rotation = c.rotation;
        s.scatterers = c.scatterers;
        const PilotBlock pilots = random_pilots(cfg, seed++);
        const ChannelParamSet truth = params_from_scenario(s, draw_gains(s, cfg, {}, seed++));
        const ObservationSet obs = synthesize(truth, cfg, pilots, 0.0, 0);
        const Condition cond = s.scatterers.empty() ? Condition::Los : Condition::Nlos;
        try
        {
            const PipelineResult r = run_pipeline(obs, pilots, cfg, s.bs, cond, ec);
            worst_p = std::max(worst_p, (r.location.solution.pose.position - s.ms).norm());
            worst_a = std::max(worst_a, std::abs(wrap_pi(r.location.solution.pose.rotation - s.rotation)));
        }
        catch (const Error &e)
        {
            failure = e.what();
            worst_p = worst_a = std::numeric_limits<double>::infinity();
        }
    }
    std::string detail = fmt("%zu scenes (LOS and NLOS), max position error %.3g m, max rotation error %.3g rad "
                             "(limit 1e-5)",
                             cases.size(), worst_p, worst_a);
    if (!failure.empty())
        detail += "; " + failure;
    return {worst_p < 1e-5 && worst_a < 1e-5, detail};
}

// One Monte Carlo campaign and the 2x bound check at the given SNRs. Uses every trial, outages included.
bool attains_bound(const CampaignConfig &cfg, const std::vector<double> &checked, std::string &detail)
{
    const MonteCarloResult mc = run_montecarlo(cfg);
    bool ok = true;
    for (const auto &row : mc.summary)
    {
        const bool checked_here = std::find(checked.begin(), checked.end(), row.snr_db) != checked.end();
        const bool good = row.rmse_p_all_m <= 2.0 * row.peb_m && row.rmse_alpha_all_rad <= 2.0 * row.reb_rad;
        if (checked_here)
            ok = ok && good;
        detail += fmt(" [%s %g dB: rmse_p %.3g / peb %.3g, rmse_a %.3g / reb %.3g, outages %d/%d%s]",
                      to_string(cfg.condition), row.snr_db, row.rmse_p_all_m, row.peb_m, row.rmse_alpha_all_rad,
                      row.reb_rad, row.n_path_count + row.n_failed, row.n_trials, checked_here ? "" : ", not checked");
    }
    return ok;
}

Outcome bound_attainment(const std::string &profile)
{
    CampaignConfig los = profile_by_name(profile);
    los.n_trials = 200;
    los.condition = Condition::Los;
    los.snr_db = {-10.0, 0.0, 10.0};
    CampaignConfig nlos = los;
    nlos.condition = Condition::Nlos;
    nlos.scene.scatterers = {{1.5, 0.4}};
    nlos.snr_db = {0.0, 10.0};
    std::string detail = profile + " profile, 200 trials:";
    const bool a = attains_bound(los, {0.0, 10.0}, detail);
    const bool b = attains_bound(nlos, {0.0, 10.0}, detail);
    return {a && b, detail};
}

Outcome condition_selection()
{
    CampaignConfig c = desk_profile();
    c.condition = Condition::Unknown;
    c.scene.scatterers = default_scatterers();
    c.scene.los_blocked = true;
    c.estimator.search.delta_alpha = 0.05;
    c.n_trials = 100;
    c.snr_db = {-20.0, -10.0, 0.0, 10.0};
    const MonteCarloResult mc = run_montecarlo(c);
    bool ok = true;
    std::string detail = "100 trials:";
    for (const auto &row : mc.summary)
    {
        // Win rate over every trial; a trial without a pose counts as a loss.
        int wins = 0;
        for (const auto &r : mc.records)
            wins += r.snr_db == row.snr_db && r.status != TrialStatus::Failed && r.branch == "olos";
        const double rate = static_cast<double>(wins) / row.n_trials;
        ok = ok && row.mean_delta_v >= 2.0 && row.mean_delta_v <= 10.0 && rate >= 0.95;
        detail += fmt(" [%g dB: mean dv %.3g, olos wins %.0f%%, failed %d]", row.snr_db, row.mean_delta_v,
                      100.0 * rate, row.n_failed);
    }
    return {ok, detail + " (dv in [2, 10], wins >= 95%)"};
}

Outcome false_alarm()
{
    const ArrayOfdmConfig cfg = desk_profile().array;
    const PilotBlock pilots = random_pilots(cfg, 5);
    const double p_fa = 1e-3;
    const double n0 = 1.0;
    const StopRule stop = make_stop_rule(n0, cfg, p_fa);
    const int trials = 10000;
    int detections = 0;
    for (int t = 0; t < trials; ++t)
    {
        const ObservationSet obs = synthesize(ChannelParamSet{}, cfg, pilots, n0, 1000 + t);
        try
        {
            dcs_somp(build_sensing(obs, pilots, cfg), stop, 1);
            ++detections;
        }
        catch (const Error &e)
        {
            if (e.code() != ErrorCode::NoPathDetected)
                throw;
        }
    }
    using boost::math::binomial_distribution;
    const double lo = binomial_distribution<>::find_lower_bound_on_p(trials, detections, 0.025);
    const double hi = binomial_distribution<>::find_upper_bound_on_p(trials, detections, 0.025);
    return {lo <= p_fa, fmt("%d detections in %d noise-only trials, rate %.2g, 95%% CI [%.2g, %.2g] (target 1e-3)",
                            detections, trials, static_cast<double>(detections) / trials, lo, hi)};
}

Outcome beam_saturation()
{
    CampaignConfig c = paper_profile();
    c.scene.sample_rectangle = true;
    c.snr_db = {-10.0};
    c.beam_counts = {4, 8, 12, 16, 20, 24, 26};
    c.reference_beams = 32;
    c.bound_positions = 200;
    c.bound_pilot_draws = 16;
    const BoundsResult b = run_bounds(c);
    bool monotone = true;
    double peb20 = 0.0, peb26 = 0.0;
    std::string curve;
    for (std::size_t i = 0; i < b.summary.size(); ++i)
    {
        const auto &row = b.summary[i];
        if (i > 0 && row.peb_q90 > b.summary[i - 1].peb_q90)
            monotone = false;
        if (row.beams == 20)
            peb20 = row.peb_q90;
        if (row.beams == 26)
            peb26 = row.peb_q90;
        curve += fmt(" G=%d:%.4g", row.beams, row.peb_q90);
    }
    const double change = std::abs(peb20 - peb26) / peb20;
    return {monotone && change < 0.05,
            fmt("PEB q90 [m]%s; %s, G 20->26 change %.2f%% (limit 5%%)", curve.c_str(),
                monotone ? "non-increasing" : "NOT monotone", 100.0 * change)};
}

Outcome property_suites()
{
    struct Suite
    {
        const char *name;
        std::function<properties::Report()> run;
    };
    const std::vector<Suite> suites{
        {"somp", [] { return properties::somp_residual_monotone(250, 11); }},
        {"sage", [] { return properties::sage_likelihood_monotone(200, 12); }},
        {"lma", [] { return properties::lma_accepted_monotone(250, 13); }},
        {"fim", [] { return properties::fim_symmetric_psd(250, 14); }},
        {"determinism", [] { return properties::deterministic_under_seed(100, 15); }},
    };
    int cases = 0, failures = 0;
    std::string detail, first;
    for (const auto &s : suites)
    {
        const properties::Report r = s.run();
        cases += r.cases;
        failures += r.failures;
        detail += fmt(" %s %d/%d", s.name, r.cases - r.failures, r.cases);
        if (first.empty() && r.failures > 0)
            first = std::string(s.name) + ": " + r.first_failure;
    }
    detail = fmt("%d cases, %d failures;", cases, failures) + detail;
    if (!first.empty())
        detail += "; first failure " + first;
    return {failures == 0 && cases >= 1000, detail};
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mmwloc acceptance checks"};
    int only = 0;
    std::string profile = "desk";
    app.add_option("--criterion", only, "run a single criterion (1-9); 0 runs all")->check(CLI::Range(0, 9));
    app.add_option("--profile", profile, "array profile for the bound attainment check")
        ->check(CLI::IsMember({"desk", "paper"}));
    CLI11_PARSE(app, argc, argv);

    const std::map<int, std::pair<const char *, std::function<Outcome()>>> criteria{
        {1, {"FIM oracle equivalence", fim_oracle}},
        {2, {"Jacobian equivalence", jacobian_oracle}},
        {3, {"EFIM fidelity", efim_fidelity}},
        {4, {"noiseless end-to-end", noiseless_end_to_end}},
        {5, {"bound attainment", [&] { return bound_attainment(profile); }}},
        {6, {"condition selection", condition_selection}},
        {7, {"false-alarm calibration", false_alarm}},
        {8, {"beam-count saturation", beam_saturation}},
        {9, {"property suites", property_suites}},
    };

    bool all = true;
    for (const auto &[id, entry] : criteria)
    {
        if (only != 0 && id != only)
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = entry.second();
        }
        catch (const std::exception &e)
        {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && out.pass;
        std::printf("criterion %d %s %s: %s (%.1f s)\n", id, out.pass ? "PASS" : "FAIL", entry.first,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
