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

#ifndef MMWLOC_CAMPAIGN_HPP
#define MMWLOC_CAMPAIGN_HPP

#include <optional>
#include <string>

#include "mmwloc/pipeline.hpp"

namespace mmwloc
{

// Scene template. With `sample_rectangle`, every trial draws the MS uniformly in [rect_min, rect_max].
struct SceneSpec
{
    Vec2 bs{0.0, 0.0};
    Vec2 ms{4.0, 0.0};
    double rotation = 0.1;
    std::vector<Vec2> scatterers;
    bool los_blocked = false;
    bool sample_rectangle = false;
    Vec2 rect_min{2.0, 0.0};
    Vec2 rect_max{4.0, 0.3};

    Scenario at(const Vec2 &ms_position) const;
};

struct CampaignConfig
{
    std::string name = "desk";
    ArrayOfdmConfig array;
    SceneSpec scene;
    GainModel gains;
    Condition condition = Condition::Los;
    std::vector<double> snr_db{-10.0, 0.0, 10.0};
    int n_trials = 200;
    std::uint64_t base_seed = 1;
    bool resample_pilots = false; // new pilots per trial instead of one block per campaign
    bool resample_gains = false;
    EstimatorConfig estimator;

    // Bounds sweep over the number of transmissions at fixed total transmit power.
    std::vector<int> beam_counts;
    int reference_beams = 0;     // G at which N_0 is set from the SNR; 0 selects the largest beam count
    int bound_positions = 100;   // MS samples per (G, SNR) when the rectangle is sampled
    int bound_pilot_draws = 4;   // pilot realizations per position

    void validate() const;
};

// Two built-in sizes: a single-machine profile and the full-size arrays.
CampaignConfig desk_profile();
CampaignConfig paper_profile();
CampaignConfig profile_by_name(const std::string &name);

// Scene used when none is given: BS at the origin, MS at (4, 0) rotated by 0.1 rad, and three scatterers.
std::vector<Vec2> default_scatterers();

enum class TrialStatus
{
    Ok,          // detected path count equals the true count
    PathCount,   // pose estimated from a wrong number of paths
    Failed,      // an estimation stage raised an error
};

const char *to_string(TrialStatus s);

struct TrialRecord
{
    double snr_db = 0.0;
    int trial = 0;
    std::uint64_t noise_seed = 0;
    TrialStatus status = TrialStatus::Failed;
    std::string failure;
    Vec2 ms_true;
    double alpha_true = 0.0;
    int k_true = 0;
    int k_hat = 0;
    std::string branch;
    Pose pose;
    double err_p = 0.0;
    double err_alpha = 0.0;
    double err_tau0 = 0.0;
    double err_aod0 = 0.0;
    double err_aoa0 = 0.0;
    double peb = 0.0;
    double reb = 0.0;
    double crb_tau0 = 0.0;
    double crb_aod0 = 0.0;
    double crb_aoa0 = 0.0;
    double cost = 0.0;
    double delta_v = 0.0;
    bool has_delta_v = false;
};

struct SummaryRow
{
    double snr_db = 0.0;
    int n_trials = 0;
    int n_ok = 0;
    int n_path_count = 0;
    int n_failed = 0;
    double rmse_tau0_ns = 0.0;
    double crb_tau0_ns = 0.0;
    double rmse_aod0_rad = 0.0;
    double crb_aod0_rad = 0.0;
    double rmse_aoa0_rad = 0.0;
    double crb_aoa0_rad = 0.0;
    double rmse_p_m = 0.0;       // trials with the correct path count
    double rmse_p_all_m = 0.0;   // every trial, failures capped at the scene diameter
    double peb_m = 0.0;          // RMS of the per-trial PEB
    double rmse_alpha_rad = 0.0;
    double rmse_alpha_all_rad = 0.0;
    double reb_rad = 0.0;
    double mean_delta_v = 0.0;   // NaN unless the condition is unknown
    double olos_win_rate = 0.0;
};

// Aggregates per SNR. Channel RMSEs only use trials whose path count is right.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord> &records, double scene_diameter);

struct MonteCarloResult
{
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;
};

// Largest distance between two of BS, MS (or the MS rectangle corners) and the scatterers.
double scene_diameter(const SceneSpec &scene);

MonteCarloResult run_montecarlo(const CampaignConfig &cfg);

// One trial at a given SNR; the record is filled even when an estimation stage fails.
// Optionally hands back the pipeline output and the true channel parameters.
TrialRecord run_trial(const CampaignConfig &cfg, double snr_db, int trial, PipelineResult *pipeline_out = nullptr,
                      ChannelParamSet *truth_out = nullptr);

struct BoundRow
{
    int beams = 0;
    double snr_db = 0.0;
    int sample = 0;
    Vec2 ms;
    double peb = 0.0;
    double reb = 0.0;
    double crb_tau0 = 0.0;
    double condition = 0.0;
    bool singular = false;
};

struct BoundSummary
{
    int beams = 0;
    double snr_db = 0.0;
    double peb_q90 = 0.0;
    double reb_q90 = 0.0;
    int n_singular = 0;
};

struct BoundsResult
{
    std::vector<BoundRow> rows;
    std::vector<BoundSummary> summary;
};

// PEB/REB over the MS rectangle (or the fixed MS) for every beam count and SNR. Pilots are nested across
// beam counts and rescaled to the total power of `reference_beams`; N_0 is fixed at that reference.
BoundsResult run_bounds(const CampaignConfig &cfg);

// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> values, double q);

} // namespace mmwloc

#endif
