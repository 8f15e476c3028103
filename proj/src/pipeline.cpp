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

#include "mmwloc/pipeline.hpp"

#include <algorithm>

namespace mmwloc
{

using std::numbers::pi;

const char *to_string(Condition c)
{
    switch (c)
    {
    case Condition::Los: return "los";
    case Condition::Nlos: return "nlos";
    case Condition::Olos: return "olos";
    case Condition::Unknown: return "unknown";
    }
    return "unknown";
}

Condition condition_from_string(const std::string &s)
{
    if (s == "los")
        return Condition::Los;
    if (s == "nlos")
        return Condition::Nlos;
    if (s == "olos")
        return Condition::Olos;
    if (s == "unknown")
        return Condition::Unknown;
    throw Error(ErrorCode::InvalidConfig, "unknown condition '" + s + "'");
}

double unfold_aoa(double aoa_estimator) { return pi - aoa_estimator; }

namespace
{

// Paths closer than this fraction of an angle bin (both angles) and of a sample period are one path.
constexpr double kMergeFraction = 0.25;

// Merges coincident paths (gains add). Returns true if anything was merged.
bool merge_coincident(std::vector<PathParams> &paths, const ArrayOfdmConfig &cfg)
{
    const double bin_tx = angle_bin_width(cfg.n_tx, cfg);
    const double bin_rx = angle_bin_width(cfg.n_rx, cfg);
    bool merged = false;
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = paths.size(); j-- > i + 1;)
        {
            const PathParams &a = paths[i];
            const PathParams &b = paths[j];
            if (std::abs(std::sin(a.aod) - std::sin(b.aod)) < kMergeFraction * bin_tx &&
                std::abs(std::sin(a.aoa) - std::sin(b.aoa)) < kMergeFraction * bin_rx &&
                std::abs(a.delay - b.delay) < kMergeFraction * cfg.sample_period())
            {
                if (std::abs(b.gain) > std::abs(a.gain))
                    paths[i] = {b.delay, b.aod, b.aoa, a.gain + b.gain};
                else
                    paths[i].gain += b.gain;
                paths.erase(paths.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
    return merged;
}

std::vector<PathParams> detect_refined(const SensingSet &sensing, const EstimatorConfig &ec, double threshold,
                                       RefinedEstimate &last)
{
    const int cap = ec.max_paths > 0 ? ec.max_paths : default_max_paths(sensing);
    const double floor = std::max(threshold, kRelativeEnergyFloor * sensing.energy());
    std::vector<PathParams> paths;
    std::vector<Eigen::MatrixXcd> residual = sensing.y;
    while (static_cast<int>(paths.size()) < cap)
    {
        const Eigen::MatrixXd scores = atom_scores(sensing, residual);
        const Eigen::Index m = best_atom(scores, {});
        CoarsePath cand = atom_path(sensing, m);
        cand.beam_gains.resize(sensing.n_subcarriers());
        double removed = 0.0;
        for (int n = 0; n < sensing.n_subcarriers(); ++n)
        {
            const Eigen::MatrixXcd corr = sensing.correlate(n, residual[n]);
            const double e = sensing.column_energy(n)(cand.rx_index, cand.tx_index);
            const cdouble c = corr(cand.rx_index, cand.tx_index);
            cand.beam_gains(n) = e > 0.0 ? c / e : cdouble{0.0, 0.0};
            removed += e > 0.0 ? std::norm(c) / e : 0.0;
        }
        if (removed <= floor)
            break;
        delay_gain_from_beam(cand, sensing);
        paths.push_back({cand.delay, cand.aod, cand.aoa, cand.gain});
        last = sage_refine(paths, sensing, ec.sage);
        paths = last.paths;
        if (merge_coincident(paths, sensing.cfg))
        {
            last = sage_refine(paths, sensing, ec.sage);
            paths = last.paths;
        }
        residual = model_residual(paths, sensing);
    }
    if (paths.empty())
        throw Error(ErrorCode::NoPathDetected, "no atom exceeded the detection threshold");
    return paths;
}

} // namespace

ChannelEstimate estimate_channel(const SensingSet &sensing, const EstimatorConfig &ec)
{
    ChannelEstimate out;
    out.threshold = stopping_threshold(sensing.noise_psd, sensing.cfg.n_subcarriers, sensing.cfg.n_rx,
                                       sensing.cfg.n_tx, ec.p_fa);
    std::vector<PathParams> paths;
    if (ec.mode == DetectionMode::Grid || !ec.refine)
    {
        StopRule rule{std::max(out.threshold, kRelativeEnergyFloor * sensing.energy()), ec.p_fa};
        out.coarse = dcs_somp(sensing, rule, ec.max_paths);
        per_path_delay_gain(out.coarse, sensing);
        for (const auto &c : out.coarse.paths)
            paths.push_back({c.delay, c.aod, c.aoa, c.gain});
        if (ec.refine)
        {
            out.refined = sage_refine(paths, sensing, ec.sage);
            paths = out.refined.paths;
        }
    }
    else
    {
        paths = detect_refined(sensing, ec, out.threshold, out.refined);
        out.refined = sage_refine(paths, sensing, ec.sage);
        paths = out.refined.paths;
    }
    out.raw = paths;

    std::stable_sort(paths.begin(), paths.end(), [](const PathParams &a, const PathParams &b) {
        if (a.delay != b.delay)
            return a.delay < b.delay;
        return a.aod < b.aod;
    });
    if (ec.los_rule == LosRule::Strongest)
    {
        const auto strongest = std::max_element(paths.begin(), paths.end(), [](const auto &a, const auto &b) {
            return std::abs(a.gain) < std::abs(b.gain);
        });
        std::rotate(paths.begin(), strongest, strongest + 1);
    }
    for (auto &p : paths)
        p.aoa = unfold_aoa(p.aoa);
    out.params.paths = std::move(paths);
    out.params.olos = false;
    return out;
}

LocalizationResult localize(const ChannelParamSet &eta_hat, Condition condition, const Vec2 &bs,
                            const ArrayOfdmConfig &cfg, const PilotBlock &pilots, double noise_psd,
                            const EstimatorConfig &ec)
{
    if (eta_hat.size() == 0)
        throw Error(ErrorCode::InsufficientPaths, "no paths to localize from");
    const double c = cfg.light_speed;
    const auto dim = static_cast<Eigen::Index>(5 * eta_hat.size());
    Eigen::MatrixXd weight = Eigen::MatrixXd::Identity(dim, dim);
    if (ec.fim_weight)
        weight = fim_channel_params(eta_hat, cfg, pilots, noise_psd > 0.0 ? noise_psd : 1.0).entries;

    LocalizationResult out;
    auto los_only = [&]() {
        PoseSolution s;
        s.pose = solve_los(eta_hat.paths[0], bs, c);
        s.gains = {eta_hat.paths[0].gain};
        s.branch = PoseBranch::Los;
        return s;
    };

    switch (condition)
    {
    case Condition::Los:
        out.solution = los_only();
        break;
    case Condition::Nlos:
        out.solution = eta_hat.size() >= 2 ? solve_nlos(eta_hat, weight, bs, c, ec.lma) : los_only();
        break;
    case Condition::Olos: {
        ChannelParamSet olos = eta_hat;
        olos.olos = true;
        out.solution = solve_olos(olos, weight, bs, ec.search, c, ec.lma);
        break;
    }
    case Condition::Unknown: {
        if (eta_hat.size() >= 3)
        {
            const UnknownSolution u = solve_unknown(eta_hat, weight, bs, ec.search, c, ec.lma);
            out.solution = u.best;
            out.nlos_cost = u.nlos.cost;
            out.olos_cost = u.olos.cost;
            out.delta_v = u.delta_v;
            out.has_delta_v = true;
        }
        else
            out.solution = eta_hat.size() >= 2 ? solve_nlos(eta_hat, weight, bs, c, ec.lma) : los_only();
        break;
    }
    }
    return out;
}

PipelineResult run_pipeline(const ObservationSet &obs, const PilotBlock &pilots, const ArrayOfdmConfig &cfg,
                            const Vec2 &bs, Condition condition, const EstimatorConfig &ec)
{
    PipelineResult out;
    const SensingSet sensing = build_sensing(obs, pilots, cfg);
    out.channel = estimate_channel(sensing, ec);
    out.location = localize(out.channel.params, condition, bs, cfg, pilots, obs.noise_psd, ec);
    return out;
}

} // namespace mmwloc
