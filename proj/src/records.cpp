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

#include "mmwloc/records.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

namespace mmwloc
{

using nlohmann::json;

namespace
{

template <class T>
void read(const json &j, const char *key, T &value)
{
    if (j.contains(key))
        j.at(key).get_to(value);
}

Vec2 read_vec(const json &j)
{
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorCode::InvalidConfig, "points are [x, y] arrays");
    return {j[0].get<double>(), j[1].get<double>()};
}

void read(const json &j, const char *key, Vec2 &value)
{
    if (j.contains(key))
        value = read_vec(j.at(key));
}

json vec_json(const Vec2 &v) { return json::array({v.x, v.y}); }

// Fixed-format number so repeated runs give byte-identical files.
std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

CampaignConfig campaign_from_json(const json &j, const CampaignConfig &base)
{
    CampaignConfig c = base;
    try
    {
        read(j, "name", c.name);
        if (j.contains("array"))
        {
            const json &a = j.at("array");
            read(a, "n_tx", c.array.n_tx);
            read(a, "n_rx", c.array.n_rx);
            read(a, "n_subcarriers", c.array.n_subcarriers);
            read(a, "n_transmissions", c.array.n_transmissions);
            read(a, "n_beams_per_tx", c.array.n_beams_per_tx);
            read(a, "cp_len_symbols", c.array.cp_len_symbols);
            read(a, "spacing_m", c.array.spacing);
            read(a, "narrowband", c.array.narrowband);
            if (a.contains("carrier_ghz"))
                c.array.carrier_hz = a.at("carrier_ghz").get<double>() * 1e9;
            if (a.contains("bandwidth_mhz"))
                c.array.bandwidth_hz = a.at("bandwidth_mhz").get<double>() * 1e6;
        }
        if (j.contains("scene"))
        {
            const json &s = j.at("scene");
            read(s, "bs", c.scene.bs);
            read(s, "ms", c.scene.ms);
            read(s, "rotation_rad", c.scene.rotation);
            read(s, "los_blocked", c.scene.los_blocked);
            read(s, "sample_rectangle", c.scene.sample_rectangle);
            read(s, "rect_min", c.scene.rect_min);
            read(s, "rect_max", c.scene.rect_max);
            if (s.contains("scatterers"))
            {
                c.scene.scatterers.clear();
                for (const auto &p : s.at("scatterers"))
                    c.scene.scatterers.push_back(read_vec(p));
            }
        }
        if (j.contains("gains"))
        {
            const json &g = j.at("gains");
            if (g.contains("law"))
            {
                const auto law = g.at("law").get<std::string>();
                if (law == "unit_modulus")
                    c.gains.law = FadingLaw::UnitModulus;
                else if (law == "complex_normal")
                    c.gains.law = FadingLaw::ComplexNormal;
                else
                    throw Error(ErrorCode::InvalidConfig, "unknown fading law '" + law + "'");
            }
            read(g, "reflection_loss_mean_db", c.gains.reflection_loss_mean_db);
            read(g, "reflection_loss_std_db", c.gains.reflection_loss_std_db);
        }
        if (j.contains("condition"))
            c.condition = condition_from_string(j.at("condition").get<std::string>());
        read(j, "snr_db", c.snr_db);
        read(j, "n_trials", c.n_trials);
        read(j, "base_seed", c.base_seed);
        read(j, "resample_pilots", c.resample_pilots);
        read(j, "resample_gains", c.resample_gains);
        if (j.contains("estimator"))
        {
            const json &e = j.at("estimator");
            EstimatorConfig &ec = c.estimator;
            read(e, "p_fa", ec.p_fa);
            if (e.contains("mode"))
            {
                const auto mode = e.at("mode").get<std::string>();
                if (mode == "grid")
                    ec.mode = DetectionMode::Grid;
                else if (mode == "refined")
                    ec.mode = DetectionMode::Refined;
                else
                    throw Error(ErrorCode::InvalidConfig, "unknown detection mode '" + mode + "'");
            }
            read(e, "refine", ec.refine);
            read(e, "max_paths", ec.max_paths);
            if (e.contains("los_rule"))
            {
                const auto rule = e.at("los_rule").get<std::string>();
                if (rule == "strongest")
                    ec.los_rule = LosRule::Strongest;
                else if (rule == "shortest_delay")
                    ec.los_rule = LosRule::ShortestDelay;
                else
                    throw Error(ErrorCode::InvalidConfig, "unknown LOS rule '" + rule + "'");
            }
            read(e, "fim_weight", ec.fim_weight);
            if (e.contains("sage"))
            {
                const json &s = e.at("sage");
                read(s, "max_outer_iters", ec.sage.max_outer_iters);
                read(s, "angle_bracket_bins", ec.sage.angle_bracket_bins);
                read(s, "delay_bracket_steps", ec.sage.delay_bracket_steps);
                read(s, "tolerance", ec.sage.tolerance);
                read(s, "record_trajectory", ec.sage.record_trajectory);
            }
            if (e.contains("search"))
            {
                read(e.at("search"), "delta_alpha_rad", ec.search.delta_alpha);
                read(e.at("search"), "alpha_max_rad", ec.search.alpha_max);
            }
            if (e.contains("lma"))
            {
                read(e.at("lma"), "max_iters", ec.lma.max_iters);
                read(e.at("lma"), "initial_damping", ec.lma.initial_damping);
            }
        }
        if (j.contains("bounds"))
        {
            const json &b = j.at("bounds");
            read(b, "beam_counts", c.beam_counts);
            read(b, "reference_beams", c.reference_beams);
            read(b, "positions", c.bound_positions);
            read(b, "pilot_draws", c.bound_pilot_draws);
        }
    }
    catch (const json::exception &e)
    {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    c.validate();
    return c;
}

json campaign_to_json(const CampaignConfig &c)
{
    json scatterers = json::array();
    for (const auto &s : c.scene.scatterers)
        scatterers.push_back(vec_json(s));
    const EstimatorConfig &ec = c.estimator;
    return {
        {"name", c.name},
        {"array",
         {{"n_tx", c.array.n_tx},
          {"n_rx", c.array.n_rx},
          {"n_subcarriers", c.array.n_subcarriers},
          {"n_transmissions", c.array.n_transmissions},
          {"n_beams_per_tx", c.array.n_beams_per_tx},
          {"cp_len_symbols", c.array.cp_len_symbols},
          {"spacing_m", c.array.spacing},
          {"carrier_ghz", c.array.carrier_hz / 1e9},
          {"bandwidth_mhz", c.array.bandwidth_hz / 1e6},
          {"narrowband", c.array.narrowband}}},
        {"scene",
         {{"bs", vec_json(c.scene.bs)},
          {"ms", vec_json(c.scene.ms)},
          {"rotation_rad", c.scene.rotation},
          {"scatterers", scatterers},
          {"los_blocked", c.scene.los_blocked},
          {"sample_rectangle", c.scene.sample_rectangle},
          {"rect_min", vec_json(c.scene.rect_min)},
          {"rect_max", vec_json(c.scene.rect_max)}}},
        {"gains",
         {{"law", c.gains.law == FadingLaw::UnitModulus ? "unit_modulus" : "complex_normal"},
          {"reflection_loss_mean_db", c.gains.reflection_loss_mean_db},
          {"reflection_loss_std_db", c.gains.reflection_loss_std_db}}},
        {"condition", to_string(c.condition)},
        {"snr_db", c.snr_db},
        {"n_trials", c.n_trials},
        {"base_seed", c.base_seed},
        {"resample_pilots", c.resample_pilots},
        {"resample_gains", c.resample_gains},
        {"estimator",
         {{"p_fa", ec.p_fa},
          {"mode", ec.mode == DetectionMode::Grid ? "grid" : "refined"},
          {"refine", ec.refine},
          {"max_paths", ec.max_paths},
          {"los_rule", ec.los_rule == LosRule::Strongest ? "strongest" : "shortest_delay"},
          {"fim_weight", ec.fim_weight},
          {"sage",
           {{"max_outer_iters", ec.sage.max_outer_iters},
            {"angle_bracket_bins", ec.sage.angle_bracket_bins},
            {"delay_bracket_steps", ec.sage.delay_bracket_steps},
            {"tolerance", ec.sage.tolerance},
            {"record_trajectory", ec.sage.record_trajectory}}},
          {"search", {{"delta_alpha_rad", ec.search.delta_alpha}, {"alpha_max_rad", ec.search.alpha_max}}},
          {"lma", {{"max_iters", ec.lma.max_iters}, {"initial_damping", ec.lma.initial_damping}}}}},
        {"bounds",
         {{"beam_counts", c.beam_counts},
          {"reference_beams", c.reference_beams},
          {"positions", c.bound_positions},
          {"pilot_draws", c.bound_pilot_draws}}},
    };
}

CampaignConfig load_campaign(const std::filesystem::path &file, const CampaignConfig &base)
{
    std::ifstream is(file);
    if (!is)
        throw Error(ErrorCode::InvalidConfig, "cannot read " + file.string());
    json j;
    try
    {
        j = json::parse(is, nullptr, true, true);
    }
    catch (const json::exception &e)
    {
        throw Error(ErrorCode::InvalidConfig, file.string() + ": " + e.what());
    }
    return campaign_from_json(j, base);
}

void write_trials_csv(std::ostream &os, const std::vector<TrialRecord> &records)
{
    os << "snr_db,trial,noise_seed,status,failure,k_true,k_hat,branch,ms_x_m,ms_y_m,alpha_rad,p_hat_x_m,p_hat_y_m,"
          "alpha_hat_rad,err_p_m,err_alpha_rad,err_tau0_ns,err_aod0_rad,err_aoa0_rad,peb_m,reb_rad,crb_tau0_ns,"
          "crb_aod0_rad,crb_aoa0_rad,cost,delta_v\n";
    for (const auto &r : records)
    {
        os << num(r.snr_db) << ',' << r.trial << ',' << r.noise_seed << ',' << to_string(r.status) << ','
           << r.failure << ',' << r.k_true << ',' << r.k_hat << ',' << r.branch << ',' << num(r.ms_true.x) << ','
           << num(r.ms_true.y) << ',' << num(r.alpha_true) << ',' << num(r.pose.position.x) << ','
           << num(r.pose.position.y) << ',' << num(r.pose.rotation) << ',' << num(r.err_p) << ','
           << num(r.err_alpha) << ',' << num(r.err_tau0 * 1e9) << ',' << num(r.err_aod0) << ','
           << num(r.err_aoa0) << ',' << num(r.peb) << ',' << num(r.reb) << ',' << num(r.crb_tau0 * 1e9) << ','
           << num(r.crb_aod0) << ',' << num(r.crb_aoa0) << ',' << num(r.cost) << ','
           << (r.has_delta_v ? num(r.delta_v) : "nan") << '\n';
    }
}

void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows)
{
    os << "snr_db,n_trials,n_ok,n_path_count,n_failed,rmse_tau0_ns,crb_tau0_ns,rmse_aod0_rad,crb_aod0_rad,"
          "rmse_aoa0_rad,crb_aoa0_rad,rmse_p_m,rmse_p_all_m,peb_m,rmse_alpha_rad,rmse_alpha_all_rad,reb_rad,"
          "mean_delta_v,olos_win_rate\n";
    for (const auto &r : rows)
        os << num(r.snr_db) << ',' << r.n_trials << ',' << r.n_ok << ',' << r.n_path_count << ',' << r.n_failed
           << ',' << num(r.rmse_tau0_ns) << ',' << num(r.crb_tau0_ns) << ',' << num(r.rmse_aod0_rad) << ','
           << num(r.crb_aod0_rad) << ',' << num(r.rmse_aoa0_rad) << ',' << num(r.crb_aoa0_rad) << ','
           << num(r.rmse_p_m) << ',' << num(r.rmse_p_all_m) << ',' << num(r.peb_m) << ','
           << num(r.rmse_alpha_rad) << ',' << num(r.rmse_alpha_all_rad) << ',' << num(r.reb_rad) << ','
           << num(r.mean_delta_v) << ',' << num(r.olos_win_rate) << '\n';
}

void write_cdf_csv(std::ostream &os, const std::vector<TrialRecord> &records)
{
    std::map<double, std::vector<double>> errors;
    for (const auto &r : records)
        if (r.status != TrialStatus::Failed)
            errors[r.snr_db].push_back(r.err_p);
    os << "snr_db,err_p_m,cdf\n";
    for (auto &[snr, e] : errors)
    {
        std::sort(e.begin(), e.end());
        for (std::size_t i = 0; i < e.size(); ++i)
            os << num(snr) << ',' << num(e[i]) << ',' << num(static_cast<double>(i + 1) / e.size()) << '\n';
    }
}

void write_bounds_csv(std::ostream &os, const BoundsResult &bounds)
{
    os << "beams,snr_db,sample,ms_x_m,ms_y_m,peb_m,reb_rad,crb_tau0_ns,condition,singular\n";
    for (const auto &r : bounds.rows)
        os << r.beams << ',' << num(r.snr_db) << ',' << r.sample << ',' << num(r.ms.x) << ',' << num(r.ms.y) << ','
           << num(r.peb) << ',' << num(r.reb) << ',' << num(r.crb_tau0 * 1e9) << ',' << num(r.condition) << ','
           << (r.singular ? 1 : 0) << '\n';
}

void write_bounds_summary_csv(std::ostream &os, const BoundsResult &bounds)
{
    os << "beams,snr_db,peb_q90_m,reb_q90_rad,n_singular\n";
    for (const auto &s : bounds.summary)
        os << s.beams << ',' << num(s.snr_db) << ',' << num(s.peb_q90) << ',' << num(s.reb_q90) << ','
           << s.n_singular << '\n';
}

void write_estimate_csv(std::ostream &os, const ChannelParamSet &truth, const ChannelEstimate &est)
{
    os << "stage,path,delay_ns,aod_rad,aoa_rad,gain_re,gain_im\n";
    auto row = [&](const char *stage, std::size_t k, const PathParams &p) {
        os << stage << ',' << k << ',' << num(p.delay * 1e9) << ',' << num(p.aod) << ',' << num(p.aoa) << ','
           << num(p.gain.real()) << ',' << num(p.gain.imag()) << '\n';
    };
    for (std::size_t k = 0; k < truth.paths.size(); ++k)
        row("truth", k, truth.paths[k]);
    for (std::size_t k = 0; k < est.coarse.paths.size(); ++k)
    {
        const CoarsePath &c = est.coarse.paths[k];
        row("coarse", k, {c.delay, c.aod, unfold_aoa(c.aoa), c.gain});
    }
    for (std::size_t k = 0; k < est.params.paths.size(); ++k)
        row("refined", k, est.params.paths[k]);
}

void write_trajectory_csv(std::ostream &os, const RefinedEstimate &refined)
{
    os << "iteration,path,delay_ns,aod_rad,aoa_rad,gain_re,gain_im,residual_energy\n";
    for (std::size_t it = 0; it < refined.trajectory.size(); ++it)
        for (std::size_t k = 0; k < refined.trajectory[it].size(); ++k)
        {
            const PathParams &p = refined.trajectory[it][k];
            const double e = it < refined.residual_energy.size() ? refined.residual_energy[it] : std::nan("");
            os << it << ',' << k << ',' << num(p.delay * 1e9) << ',' << num(p.aod) << ',' << num(p.aoa) << ','
               << num(p.gain.real()) << ',' << num(p.gain.imag()) << ',' << num(e) << '\n';
        }
}

} // namespace mmwloc
