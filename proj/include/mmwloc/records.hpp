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

#ifndef MMWLOC_RECORDS_HPP
#define MMWLOC_RECORDS_HPP

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "mmwloc/campaign.hpp"

namespace mmwloc
{

// JSON round trip of campaign configurations. Missing keys keep the values of `base`.
CampaignConfig campaign_from_json(const nlohmann::json &j, const CampaignConfig &base);
nlohmann::json campaign_to_json(const CampaignConfig &cfg);
CampaignConfig load_campaign(const std::filesystem::path &file, const CampaignConfig &base);

void write_trials_csv(std::ostream &os, const std::vector<TrialRecord> &records);
void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows);
// Empirical CDF of the position error per SNR (failures excluded).
void write_cdf_csv(std::ostream &os, const std::vector<TrialRecord> &records);
void write_bounds_csv(std::ostream &os, const BoundsResult &bounds);
void write_bounds_summary_csv(std::ostream &os, const BoundsResult &bounds);
// Channel estimates of a single run: coarse (grid mode), refined, and the SAGE trajectory.
void write_estimate_csv(std::ostream &os, const ChannelParamSet &truth, const ChannelEstimate &est);
void write_trajectory_csv(std::ostream &os, const RefinedEstimate &refined);

// Writes `contents` through `writer` to dir/name, creating the directory. Throws InvalidArgument on I/O error.
template <class Writer>
void write_file(const std::filesystem::path &dir, const std::string &name, Writer &&writer);

} // namespace mmwloc

#include <fstream>

namespace mmwloc
{

template <class Writer>
void write_file(const std::filesystem::path &dir, const std::string &name, Writer &&writer)
{
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os)
        throw Error(ErrorCode::InvalidArgument, "cannot open " + (dir / name).string());
    writer(os);
    if (!os)
        throw Error(ErrorCode::InvalidArgument, "write failed for " + (dir / name).string());
}

} // namespace mmwloc

#endif
