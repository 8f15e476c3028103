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

#ifndef MMWLOC_POSE_HPP
#define MMWLOC_POSE_HPP

#include "mmwloc/geometry.hpp"
#include "mmwloc/lma.hpp"

namespace mmwloc
{

enum class PoseBranch
{
    Los,
    Nlos,
    Olos,
};

const char *to_string(PoseBranch b);

struct OlosSearchConfig
{
    double delta_alpha = 0.05; // [rad]
    double alpha_max = 0.5;    // [rad]

    // Throws InvalidArgument unless 0 < delta_alpha <= alpha_max.
    void validate() const;
};

struct PoseSolution
{
    Pose pose;
    std::vector<Vec2> scatterers; // in the order of the NLOS paths of the input
    std::vector<cdouble> gains;
    double cost = 0.0;            // weighted EXIP cost
    PoseBranch branch = PoseBranch::Los;
    int iterations = 0;
    double damping = 0.0;
};

// Closed-form LOS inversion; angles are physical (AOA including the pi offset).
Pose solve_los(const PathParams &path0, const Vec2 &bs, double light_speed = kLightSpeed);

// Weighted residual eta_hat - f(eta_loc) with wrapped angle components.
Eigen::VectorXd exip_residual(const ChannelParamSet &eta_hat, const LocationParams &loc, const Vec2 &bs,
                              double light_speed = kLightSpeed);
double exip_cost(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const LocationParams &loc,
                 const Vec2 &bs, double light_speed = kLightSpeed);

// Intersection of the ray from `origin_a` along angle `angle_a` with the ray from `origin_b` along `angle_b`.
// Near-parallel rays fall back to the midpoint of their closest points.
Vec2 intersect_rays(const Vec2 &origin_a, double angle_a, const Vec2 &origin_b, double angle_b);

// Scatterer consistent with a path given the MS pose: two-line intersection, or the delay ellipse when the
// intersection lies behind either array.
Vec2 initial_scatterer(const PathParams &path, const Pose &pose, const Vec2 &bs, double light_speed = kLightSpeed);

// LOS plus scatterers. `weight` is the channel FIM at the estimate (or identity). Throws InsufficientPaths.
PoseSolution solve_nlos(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                        double light_speed = kLightSpeed, const LmaOptions &opts = {});

// Blocked LOS: every path is a single bounce; trial rotations seed the linear two-path solution.
// Throws InsufficientPaths with fewer than three paths.
PoseSolution solve_olos(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                        const OlosSearchConfig &search = {}, double light_speed = kLightSpeed,
                        const LmaOptions &opts = {});

// Costs below this fraction of eta^T W eta count as exact fits when choosing a hypothesis.
inline constexpr double kCostTieTolerance = 1e-12;

struct UnknownSolution
{
    PoseSolution best;
    PoseSolution nlos;
    PoseSolution olos;
    double delta_v = 0.0; // v_nlos / v_olos
};

// Runs both hypotheses (the shortest path as LOS, or no LOS) and keeps the lower raw cost; exact fits on both
// sides resolve to NLOS.
UnknownSolution solve_unknown(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                              const OlosSearchConfig &search = {}, double light_speed = kLightSpeed,
                              const LmaOptions &opts = {});

} // namespace mmwloc

#endif
