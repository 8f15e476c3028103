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

#ifndef MMWLOC_FIM_HPP
#define MMWLOC_FIM_HPP

#include "mmwloc/channel.hpp"

namespace mmwloc
{

// Index origin of the element-position matrices used for the angle derivatives. Centered matches the
// steering vectors; ZeroBased uses 0 .. N-1 and is kept only for comparison.
enum class DerivativeOrigin
{
    Centered,
    ZeroBased,
};

// Symmetric information matrix. Channel domain: per path [tau, aod, aoa, Re h, Im h].
// Location domain: the location vector ordering of `location_vector`.
struct FimMatrix
{
    enum class Domain
    {
        Channel,
        Location,
    };

    Eigen::MatrixXd entries;
    Domain domain = Domain::Channel;
    std::size_t n_paths = 0;
    bool olos = false;
};

// Channel-parameter FIM (2/N_0) sum_{n,g} Re{dmu^H dmu}, with per-transmission contributions summed.
// Throws InvalidArgument for noise_psd <= 0, SingularInput when every pilot is zero.
FimMatrix fim_channel_params(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                             double noise_psd, DerivativeOrigin origin = DerivativeOrigin::Centered);

// J_loc = T J T^T. Throws DimensionMismatch.
FimMatrix fim_location(const LocationParams &loc, const Vec2 &bs, const FimMatrix &fim_eta,
                       double light_speed = kLightSpeed);
FimMatrix fim_location(const Scenario &s, const FimMatrix &fim_eta, double light_speed = kLightSpeed);

// Inverse of a symmetric information matrix, computed after diagonal equilibration.
struct FimInverse
{
    Eigen::MatrixXd inverse;
    double condition = 0.0; // of the equilibrated matrix
};

// Largest equilibrated condition number accepted by `invert_fim`.
inline constexpr double kMaxFimCondition = 1e12;

// Throws SingularFim (message carries the condition number).
FimInverse invert_fim(const Eigen::MatrixXd &fim);

// Square-root bounds: PEB/REB from the location FIM, per-path CRBs from the channel FIM.
struct BoundReport
{
    double peb = 0.0;                 // [m]
    double reb = 0.0;                 // [rad]
    std::vector<double> crb_delay;    // [s]
    std::vector<double> crb_aod;      // [rad]
    std::vector<double> crb_aoa;      // [rad]
    double condition = 0.0;
};

BoundReport bounds(const FimMatrix &fim_loc);

// Fills the per-path channel CRBs of `report` from the channel FIM.
void add_channel_crbs(BoundReport &report, const FimMatrix &fim_eta);

// All bounds of a scenario. `gains` follow scenario order.
BoundReport scenario_bounds(const Scenario &s, const std::vector<cdouble> &gains, const ArrayOfdmConfig &cfg,
                            const PilotBlock &pilots, double noise_psd);

// Large-array approximation of the 3x3 equivalent FIM of [p_x, p_y, alpha] that ignores cross-path terms.
Eigen::Matrix3d efim_position_rotation(const LocationParams &loc, const Vec2 &bs, const ArrayOfdmConfig &cfg,
                                       const PilotBlock &pilots, double noise_psd);
Eigen::Matrix3d efim_position_rotation(const Scenario &s, const std::vector<cdouble> &gains,
                                       const ArrayOfdmConfig &cfg, const PilotBlock &pilots, double noise_psd);

// PEB from any FIM whose first two coordinates are the position.
double position_error_bound(const Eigen::MatrixXd &fim);

} // namespace mmwloc

#endif
