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

#ifndef MMWLOC_PIPELINE_HPP
#define MMWLOC_PIPELINE_HPP

#include "mmwloc/fim.hpp"
#include "mmwloc/pose.hpp"
#include "mmwloc/sage.hpp"

namespace mmwloc
{

enum class Condition
{
    Los,
    Nlos,
    Olos,
    Unknown,
};

const char *to_string(Condition c);
Condition condition_from_string(const std::string &s);

enum class DetectionMode
{
    Grid,    // DCS-SOMP on the grid, per-path delay/gain, then SAGE
    Refined, // greedy detection against the residual of the SAGE-refined paths
};

// Which estimated path is taken as the LOS path (index 0 of the output).
enum class LosRule
{
    Strongest,     // largest |gain|; the rest sorted by delay
    ShortestDelay, // plain delay order
};

struct EstimatorConfig
{
    double p_fa = 1e-3;
    DetectionMode mode = DetectionMode::Refined;
    bool refine = true; // false: coarse grid estimates only (grid mode)
    int max_paths = 0;  // 0: min(G * N_r, 20)
    LosRule los_rule = LosRule::Strongest;
    RefineConfig sage;
    OlosSearchConfig search;
    LmaOptions lma;
    bool fim_weight = true; // false: identity weighting
};

// Energy removals below this fraction of the observation energy are treated as round-off.
inline constexpr double kRelativeEnergyFloor = 1e-10;

struct ChannelEstimate
{
    ChannelParamSet params;        // LOS candidate first, then by delay; AOA on the rear branch
    std::vector<PathParams> raw;   // estimator-domain paths in detection order
    CoarseEstimate coarse;         // grid mode only
    RefinedEstimate refined;       // final SAGE pass
    double threshold = 0.0;
};

// Estimator-domain (arcsin) AOA to the physical branch facing the BS, and back.
double unfold_aoa(double aoa_estimator);

// Runs detection and refinement. Throws NoPathDetected.
ChannelEstimate estimate_channel(const SensingSet &sensing, const EstimatorConfig &ec);

struct LocalizationResult
{
    PoseSolution solution;
    double nlos_cost = 0.0;
    double olos_cost = 0.0;
    double delta_v = 0.0;
    bool has_delta_v = false;
};

// Pose from channel estimates under the given propagation condition. The EXIP weight is the channel FIM
// evaluated at the estimates (N_0 = 1 when the observations are noiseless).
LocalizationResult localize(const ChannelParamSet &eta_hat, Condition condition, const Vec2 &bs,
                            const ArrayOfdmConfig &cfg, const PilotBlock &pilots, double noise_psd,
                            const EstimatorConfig &ec);

struct PipelineResult
{
    ChannelEstimate channel;
    LocalizationResult location;
};

PipelineResult run_pipeline(const ObservationSet &obs, const PilotBlock &pilots, const ArrayOfdmConfig &cfg,
                            const Vec2 &bs, Condition condition, const EstimatorConfig &ec);

} // namespace mmwloc

#endif
