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

#ifndef MMWLOC_GEOMETRY_HPP
#define MMWLOC_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mmwloc/error.hpp"

namespace mmwloc
{

using cdouble = std::complex<double>;

// Speed of light used throughout the simulations [m/s] (0.299792 m/ns).
inline constexpr double kLightSpeed = 2.99792e8;

// Pairwise distances below this value are treated as coincident points [m].
inline constexpr double kDegeneracyEpsilon = 1e-9;

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2 &o) const = default;

    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Wraps to [0, 2pi).
double wrap_two_pi(double angle);

// Wraps to (-pi, pi].
double wrap_pi(double angle);

// Ground truth geometry. The BS array is aligned with the x-axis; the MS array is rotated by `rotation`.
struct Scenario
{
    Vec2 bs;
    Vec2 ms;
    double rotation = 0.0;
    std::vector<Vec2> scatterers;
    bool los_blocked = false;

    // Number of propagation paths (LOS counted iff not blocked).
    std::size_t path_count() const { return scatterers.size() + (los_blocked ? 0 : 1); }

    // Throws DegenerateGeometry / InvalidArgument when the invariants are violated.
    void validate() const;
};

// Channel parameters of one path. `gain` is the normalized coefficient sqrt(Nt*Nr/rho) * h.
struct PathParams
{
    double delay = 0.0; // [s]
    double aod = 0.0;   // [rad]
    double aoa = 0.0;   // [rad]
    cdouble gain{0.0, 0.0};
};

struct ChannelParamSet
{
    std::vector<PathParams> paths; // index 0 is the LOS path unless `olos`
    bool olos = false;

    std::size_t size() const { return paths.size(); }
};

struct Pose
{
    Vec2 position;
    double rotation = 0.0; // [0, 2pi)
};

// Location-domain parameters: MS pose, one scatterer per NLOS path and the path gains.
// Gains are ordered like the paths they generate (LOS first unless `olos`).
struct LocationParams
{
    Pose pose;
    std::vector<Vec2> scatterers;
    std::vector<cdouble> gains;
    bool olos = false;

    std::size_t path_count() const { return scatterers.size() + (olos ? 0 : 1); }
};

// Permutation that orders scatterers by the delay of their path (ties by AOD).
std::vector<std::size_t> scatterer_order(const Scenario &s, double light_speed = kLightSpeed);

// Forward geometric mapping from location to channel parameters, without reordering.
ChannelParamSet channel_params_from_location(const LocationParams &loc, const Vec2 &bs,
                                             double light_speed = kLightSpeed);

// Channel parameters of a scenario. `gains` follow the scenario order [LOS (if present), scatterers...];
// the returned NLOS paths are sorted by delay, ties broken by AOD.
ChannelParamSet params_from_scenario(const Scenario &s, const std::vector<cdouble> &gains,
                                     double light_speed = kLightSpeed);

// Location parameters of a scenario with scatterers in the same order as `params_from_scenario`.
LocationParams location_from_scenario(const Scenario &s, const std::vector<cdouble> &gains,
                                      double light_speed = kLightSpeed);

// Jacobian T = d eta^T / d eta_loc of the geometric mapping. Rows follow the location vector
// [p, alpha, h_0, s_1, h_1, ...] (OLOS: [p, alpha, s_1, h_1, ...]); columns follow the channel vector
// [tau_k, aod_k, aoa_k, Re h_k, Im h_k] per path.
Eigen::MatrixXd transformation_matrix(const LocationParams &loc, const Vec2 &bs,
                                      double light_speed = kLightSpeed);
Eigen::MatrixXd transformation_matrix(const Scenario &s, double light_speed = kLightSpeed);

// Removes the LOS path. Throws EmptyParamSet when no NLOS path remains.
ChannelParamSet olos_param_subset(const ChannelParamSet &cp);

// Flat vectors in the orderings used by the FIM and the transformation matrix.
Eigen::VectorXd channel_vector(const ChannelParamSet &cp);
ChannelParamSet channel_from_vector(const Eigen::VectorXd &v, bool olos);
Eigen::VectorXd location_vector(const LocationParams &loc);
LocationParams location_from_vector(const Eigen::VectorXd &v, bool olos);

inline std::size_t channel_dim(std::size_t n_paths) { return 5 * n_paths; }
inline std::size_t location_dim(std::size_t n_scatterers, bool olos)
{
    return 3 + 4 * n_scatterers + (olos ? 0 : 2);
}

} // namespace mmwloc

#endif
