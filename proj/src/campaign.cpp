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

#include "mmwloc/campaign.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

namespace mmwloc
{

using std::numbers::pi;

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent seed streams. Noise uses base_seed + trial directly.
constexpr std::uint64_t kPilotStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kGainStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kPositionStream = 0x94d049bb133111ebULL;

std::uint64_t pilot_seed(const CampaignConfig &cfg, int trial)
{
    return cfg.base_seed + kPilotStream + (cfg.resample_pilots ? static_cast<std::uint64_t>(trial) : 0U);
}

std::uint64_t gain_seed(const CampaignConfig &cfg, int trial)
{
    return cfg.base_seed + kGainStream + (cfg.resample_gains ? static_cast<std::uint64_t>(trial) : 0U);
}

Vec2 sample_position(const SceneSpec &scene, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(scene.rect_min.x, scene.rect_max.x);
    std::uniform_real_distribution<double> uy(scene.rect_min.y, scene.rect_max.y);
    const double x = ux(rng);
    return {x, uy(rng)};
}

Vec2 trial_position(const CampaignConfig &cfg, int sample)
{
    if (!cfg.scene.sample_rectangle)
        return cfg.scene.ms;
    return sample_position(cfg.scene, cfg.base_seed + kPositionStream + static_cast<std::uint64_t>(sample));
}

double rms(const std::vector<double> &v)
{
    if (v.empty())
        return kNaN;
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Sum of normalized delay and sine-domain angle differences.
double path_distance(const PathParams &a, const PathParams &b, const ArrayOfdmConfig &cfg)
{
    const double bin_tx = angle_bin_width(cfg.n_tx, cfg);
    const double bin_rx = angle_bin_width(cfg.n_rx, cfg);
    return std::abs(a.delay - b.delay) / cfg.sample_period() + std::abs(std::sin(a.aod) - std::sin(b.aod)) / bin_tx +
           std::abs(std::sin(a.aoa) - std::sin(b.aoa)) / bin_rx;
}

// Minimum-cost assignment of truth paths to estimated paths (exact, DP over subsets of the smaller side).
// Returns, per truth path, the matched estimate index or -1.
std::vector<int> match_paths(const std::vector<PathParams> &truth, const std::vector<PathParams> &est,
                             const ArrayOfdmConfig &cfg)
{
    const bool swap = truth.size() > est.size();
    const auto &small = swap ? est : truth;
    const auto &large = swap ? truth : est;
    const std::size_t ns = small.size();
    const std::size_t nl = large.size();
    std::vector<int> out(truth.size(), -1);
    if (ns == 0)
        return out;
    if (ns > 16)
        throw Error(ErrorCode::InvalidArgument, "too many paths to match");

    const std::size_t full = (std::size_t{1} << ns);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // dp[i][mask]: best cost using large[0..i) with `mask` of small assigned.
    std::vector<std::vector<double>> dp(nl + 1, std::vector<double>(full, kInf));
    dp[0][0] = 0.0;
    for (std::size_t i = 0; i < nl; ++i)
        for (std::size_t mask = 0; mask < full; ++mask)
        {
            if (dp[i][mask] == kInf)
                continue;
            dp[i + 1][mask] = std::min(dp[i + 1][mask], dp[i][mask]);
            for (std::size_t j = 0; j < ns; ++j)
                if (!(mask & (std::size_t{1} << j)))
                {
                    const double c = dp[i][mask] + path_distance(large[i], small[j], cfg);
                    auto &slot = dp[i + 1][mask | (std::size_t{1} << j)];
                    slot = std::min(slot, c);
                }
        }
    // Backtrack.
    std::size_t mask = full - 1;
    for (std::size_t i = nl; i-- > 0;)
    {
        if (dp[i + 1][mask] == dp[i][mask])
            continue;
        for (std::size_t j = 0; j < ns; ++j)
        {
            const std::size_t bit = std::size_t{1} << j;
            if ((mask & bit) && dp[i][mask ^ bit] != kInf &&
                dp[i][mask ^ bit] + path_distance(large[i], small[j], cfg) == dp[i + 1][mask])
            {
                if (swap)
                    out[i] = static_cast<int>(j);
                else
                    out[j] = static_cast<int>(i);
                mask ^= bit;
                break;
            }
        }
    }
    return out;
}

} // namespace

Scenario SceneSpec::at(const Vec2 &ms_position) const
{
    Scenario s;
    s.bs = bs;
    s.ms = ms_position;
    s.rotation = rotation;
    s.scatterers = scatterers;
    s.los_blocked = los_blocked;
    return s;
}

void CampaignConfig::validate() const
{
    if (n_trials < 1)
        throw Error(ErrorCode::InvalidConfig, "n_trials must be at least 1");
    if (snr_db.empty())
        throw Error(ErrorCode::InvalidConfig, "the SNR grid is empty");
    array.validate();
    estimator.search.validate();
    if (!(estimator.p_fa > 0.0 && estimator.p_fa < 1.0))
        throw Error(ErrorCode::InvalidConfig, "p_fa must lie in (0, 1)");
    for (int g : beam_counts)
        if (g < 1)
            throw Error(ErrorCode::InvalidConfig, "beam counts must be positive");
    if (reference_beams < 0 || bound_positions < 1 || bound_pilot_draws < 1)
        throw Error(ErrorCode::InvalidConfig, "invalid bounds sweep sizes");
    if (scene.sample_rectangle && !(scene.rect_min.x <= scene.rect_max.x && scene.rect_min.y <= scene.rect_max.y))
        throw Error(ErrorCode::InvalidConfig, "rectangle corners are out of order");
    if (scene.los_blocked != (condition == Condition::Olos) && condition != Condition::Unknown)
        throw Error(ErrorCode::InvalidConfig, "condition does not match the scene's LOS state");
    if (condition == Condition::Los && !scene.scatterers.empty())
        throw Error(ErrorCode::InvalidConfig, "los condition with scatterers; use nlos");
    scene.at(scene.ms).validate();
}

std::vector<Vec2> default_scatterers() { return {{1.5, 0.4}, {1.5, 0.9}, {1.5, 1.4}}; }

CampaignConfig desk_profile()
{
    CampaignConfig c;
    c.name = "desk";
    c.array.n_tx = 16;
    c.array.n_rx = 16;
    c.array.n_transmissions = 16;
    c.array.n_subcarriers = 10;
    c.n_trials = 200;
    return c;
}

CampaignConfig paper_profile()
{
    CampaignConfig c;
    c.name = "paper";
    c.array.n_tx = 65;
    c.array.n_rx = 65;
    c.array.n_transmissions = 32;
    c.array.n_subcarriers = 20;
    c.n_trials = 1000;
    return c;
}

CampaignConfig profile_by_name(const std::string &name)
{
    if (name == "desk")
        return desk_profile();
    if (name == "paper")
        return paper_profile();
    throw Error(ErrorCode::InvalidConfig, "unknown profile '" + name + "'");
}

const char *to_string(TrialStatus s)
{
    switch (s)
    {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::PathCount: return "path_count";
    case TrialStatus::Failed: return "failed";
    }
    return "failed";
}

double scene_diameter(const SceneSpec &scene)
{
    std::vector<Vec2> pts{scene.bs, scene.ms};
    if (scene.sample_rectangle)
    {
        pts.push_back(scene.rect_min);
        pts.push_back(scene.rect_max);
        pts.push_back({scene.rect_min.x, scene.rect_max.y});
        pts.push_back({scene.rect_max.x, scene.rect_min.y});
    }
    pts.insert(pts.end(), scene.scatterers.begin(), scene.scatterers.end());
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

TrialRecord run_trial(const CampaignConfig &cfg, double snr_db, int trial, PipelineResult *pipeline_out,
                      ChannelParamSet *truth_out)
{
    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.trial = trial;
    rec.noise_seed = cfg.base_seed + static_cast<std::uint64_t>(trial);

    const Scenario sc = cfg.scene.at(trial_position(cfg, trial));
    rec.ms_true = sc.ms;
    rec.alpha_true = sc.rotation;
    rec.k_true = static_cast<int>(sc.path_count());

    const PilotBlock pilots = random_pilots(cfg.array, pilot_seed(cfg, trial));
    const std::vector<cdouble> gains = draw_gains(sc, cfg.array, cfg.gains, gain_seed(cfg, trial));
    const ChannelParamSet truth = params_from_scenario(sc, gains, cfg.array.light_speed);
    if (truth_out)
        *truth_out = truth;
    const double n0 = noise_psd_for_snr(truth, cfg.array, pilots, snr_db);

    rec.peb = rec.reb = rec.crb_tau0 = rec.crb_aod0 = rec.crb_aoa0 = kNaN;
    try
    {
        const BoundReport b = scenario_bounds(sc, gains, cfg.array, pilots, n0);
        rec.peb = b.peb;
        rec.reb = b.reb;
        rec.crb_tau0 = b.crb_delay.at(0);
        rec.crb_aod0 = b.crb_aod.at(0);
        rec.crb_aoa0 = b.crb_aoa.at(0);
    }
    catch (const Error &)
    {
        // singular bounds are reported as NaN
    }

    try
    {
        const ObservationSet obs = synthesize(truth, cfg.array, pilots, n0, rec.noise_seed);
        PipelineResult res = run_pipeline(obs, pilots, cfg.array, sc.bs, cfg.condition, cfg.estimator);
        const auto &est = res.channel.params.paths;
        rec.k_hat = static_cast<int>(est.size());
        rec.status = rec.k_hat == rec.k_true ? TrialStatus::Ok : TrialStatus::PathCount;
        rec.branch = to_string(res.location.solution.branch);
        rec.pose = res.location.solution.pose;
        rec.cost = res.location.solution.cost;
        rec.delta_v = res.location.delta_v;
        rec.has_delta_v = res.location.has_delta_v;
        rec.err_p = (rec.pose.position - sc.ms).norm();
        rec.err_alpha = std::abs(wrap_pi(rec.pose.rotation - sc.rotation));

        const std::vector<int> match = match_paths(truth.paths, est, cfg.array);
        if (match[0] >= 0)
        {
            const PathParams &e = est[static_cast<std::size_t>(match[0])];
            rec.err_tau0 = e.delay - truth.paths[0].delay;
            rec.err_aod0 = wrap_pi(e.aod - truth.paths[0].aod);
            rec.err_aoa0 = wrap_pi(e.aoa - truth.paths[0].aoa);
        }
        else
            rec.err_tau0 = rec.err_aod0 = rec.err_aoa0 = kNaN;
        if (pipeline_out)
            *pipeline_out = std::move(res);
    }
    catch (const Error &e)
    {
        rec.status = TrialStatus::Failed;
        rec.failure = to_string(e.code());
        rec.err_p = rec.err_alpha = rec.err_tau0 = rec.err_aod0 = rec.err_aoa0 = kNaN;
    }
    return rec;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord> &records, double diameter)
{
    std::map<double, std::vector<const TrialRecord *>> groups;
    for (const auto &r : records)
        groups[r.snr_db].push_back(&r);

    std::vector<SummaryRow> rows;
    for (auto &[snr, group] : groups)
    {
        std::sort(group.begin(), group.end(),
                  [](const TrialRecord *a, const TrialRecord *b) { return a->trial < b->trial; });
        SummaryRow row;
        row.snr_db = snr;
        row.n_trials = static_cast<int>(group.size());
        std::vector<double> tau, aod, aoa, p, alpha, p_all, alpha_all, peb, reb, crb_tau, crb_aod, crb_aoa;
        double dv_sum = 0.0;
        int dv_count = 0, olos_wins = 0, solved = 0;
        for (const TrialRecord *r : group)
        {
            if (std::isfinite(r->peb))
                peb.push_back(r->peb);
            if (std::isfinite(r->reb))
                reb.push_back(r->reb);
            if (std::isfinite(r->crb_tau0))
            {
                crb_tau.push_back(r->crb_tau0 * 1e9);
                crb_aod.push_back(r->crb_aod0);
                crb_aoa.push_back(r->crb_aoa0);
            }
            switch (r->status)
            {
            case TrialStatus::Ok:
                ++row.n_ok;
                p.push_back(r->err_p);
                alpha.push_back(r->err_alpha);
                if (std::isfinite(r->err_tau0))
                {
                    tau.push_back(r->err_tau0 * 1e9);
                    aod.push_back(r->err_aod0);
                    aoa.push_back(r->err_aoa0);
                }
                break;
            case TrialStatus::PathCount: ++row.n_path_count; break;
            case TrialStatus::Failed: ++row.n_failed; break;
            }
            if (r->status == TrialStatus::Failed)
            {
                p_all.push_back(diameter);
                alpha_all.push_back(pi);
                continue;
            }
            ++solved;
            p_all.push_back(std::min(r->err_p, diameter));
            alpha_all.push_back(r->err_alpha);
            if (r->branch == "olos")
                ++olos_wins;
            if (r->has_delta_v)
            {
                dv_sum += r->delta_v;
                ++dv_count;
            }
        }
        row.rmse_tau0_ns = rms(tau);
        row.rmse_aod0_rad = rms(aod);
        row.rmse_aoa0_rad = rms(aoa);
        row.crb_tau0_ns = rms(crb_tau);
        row.crb_aod0_rad = rms(crb_aod);
        row.crb_aoa0_rad = rms(crb_aoa);
        row.rmse_p_m = rms(p);
        row.rmse_alpha_rad = rms(alpha);
        row.rmse_p_all_m = rms(p_all);
        row.rmse_alpha_all_rad = rms(alpha_all);
        row.peb_m = rms(peb);
        row.reb_rad = rms(reb);
        row.mean_delta_v = dv_count > 0 ? dv_sum / dv_count : kNaN;
        row.olos_win_rate = solved > 0 ? static_cast<double>(olos_wins) / solved : kNaN;
        rows.push_back(row);
    }
    return rows;
}

MonteCarloResult run_montecarlo(const CampaignConfig &cfg)
{
    cfg.validate();
    MonteCarloResult out;
    for (double snr : cfg.snr_db)
        for (int t = 0; t < cfg.n_trials; ++t)
            out.records.push_back(run_trial(cfg, snr, t));
    out.summary = summarize(out.records, scene_diameter(cfg.scene));
    return out;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        return kNaN;
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BoundsResult run_bounds(const CampaignConfig &cfg)
{
    cfg.validate();
    std::vector<int> counts = cfg.beam_counts;
    if (counts.empty())
        counts.push_back(cfg.array.n_transmissions);
    const int g_max = *std::max_element(counts.begin(), counts.end());
    const int g_ref = cfg.reference_beams > 0 ? cfg.reference_beams : g_max;

    ArrayOfdmConfig big = cfg.array;
    big.n_transmissions = std::max(g_max, g_ref);
    ArrayOfdmConfig ref_cfg = cfg.array;
    ref_cfg.n_transmissions = g_ref;

    const int n_positions = cfg.scene.sample_rectangle ? cfg.bound_positions : 1;
    BoundsResult out;
    for (int pos = 0; pos < n_positions; ++pos)
    {
        const Scenario sc = cfg.scene.at(trial_position(cfg, pos));
        const std::vector<cdouble> gains = draw_gains(sc, cfg.array, cfg.gains, gain_seed(cfg, pos));
        const ChannelParamSet truth = params_from_scenario(sc, gains, cfg.array.light_speed);
        for (int draw = 0; draw < cfg.bound_pilot_draws; ++draw)
        {
            const PilotBlock all = random_pilots(big, pilot_seed(cfg, 0) + static_cast<std::uint64_t>(draw));
            const PilotBlock ref_pilots = all.truncated(g_ref);
            for (double snr : cfg.snr_db)
            {
                const double n0 = noise_psd_for_snr(truth, ref_cfg, ref_pilots, snr);
                for (int g : counts)
                {
                    ArrayOfdmConfig gcfg = cfg.array;
                    gcfg.n_transmissions = g;
                    const PilotBlock pg = all.truncated(g).scaled(std::sqrt(static_cast<double>(g_ref) / g));
                    BoundRow row;
                    row.beams = g;
                    row.snr_db = snr;
                    row.sample = pos * cfg.bound_pilot_draws + draw;
                    row.ms = sc.ms;
                    try
                    {
                        const BoundReport b = scenario_bounds(sc, gains, gcfg, pg, n0);
                        row.peb = b.peb;
                        row.reb = b.reb;
                        row.crb_tau0 = b.crb_delay.at(0);
                        row.condition = b.condition;
                    }
                    catch (const Error &e)
                    {
                        if (e.code() != ErrorCode::SingularFim)
                            throw;
                        row.singular = true;
                        row.peb = row.reb = row.crb_tau0 = kNaN;
                    }
                    out.rows.push_back(row);
                }
            }
        }
    }

    for (double snr : cfg.snr_db)
        for (int g : counts)
        {
            BoundSummary s;
            s.beams = g;
            s.snr_db = snr;
            std::vector<double> peb, reb;
            for (const auto &r : out.rows)
                if (r.beams == g && r.snr_db == snr)
                {
                    if (r.singular)
                        ++s.n_singular;
                    else
                    {
                        peb.push_back(r.peb);
                        reb.push_back(r.reb);
                    }
                }
            s.peb_q90 = quantile(peb, 0.9);
            s.reb_q90 = quantile(reb, 0.9);
            out.summary.push_back(s);
        }
    return out;
}

} // namespace mmwloc
