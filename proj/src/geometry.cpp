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

#include "mmwloc/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mmwloc
{

using std::numbers::pi;

double wrap_two_pi(double angle)
{
    double a = std::fmod(angle, 2.0 * pi);
    if (a < 0.0)
        a += 2.0 * pi;
    if (a >= 2.0 * pi)
        a = 0.0;
    return a;
}

double wrap_pi(double angle)
{
    double a = std::fmod(angle + pi, 2.0 * pi);
    if (a <= 0.0)
        a += 2.0 * pi;
    return a - pi;
}

namespace
{

void require_separated(const Vec2 &a, const Vec2 &b, const char *what)
{
    if ((a - b).norm() < kDegeneracyEpsilon)
        throw Error(ErrorCode::DegenerateGeometry, std::string(what) + " are coincident");
}

void check_location(const LocationParams &loc, const Vec2 &bs)
{
    if (!loc.pose.position.finite() || !bs.finite() || !std::isfinite(loc.pose.rotation))
        throw Error(ErrorCode::InvalidArgument, "non-finite pose");
    if (!loc.olos)
        require_separated(loc.pose.position, bs, "MS and BS");
    for (const auto &s : loc.scatterers)
    {
        if (!s.finite())
            throw Error(ErrorCode::InvalidArgument, "non-finite scatterer");
        require_separated(s, bs, "scatterer and BS");
        require_separated(s, loc.pose.position, "scatterer and MS");
    }
}

// Path parameters of one reflection, angles per the forward model:
//   aod = angle(s - q),  aoa = pi + angle(p - s) - alpha.
PathParams reflected_path(const Vec2 &p, double alpha, const Vec2 &s, const Vec2 &q, double c)
{
    const Vec2 sq = s - q;
    const Vec2 ps = p - s;
    PathParams out;
    out.delay = (sq.norm() + ps.norm()) / c;
    out.aod = sq.angle();
    out.aoa = pi + ps.angle() - alpha;
    return out;
}

} // namespace

void Scenario::validate() const
{
    if (!bs.finite() || !ms.finite() || !std::isfinite(rotation))
        throw Error(ErrorCode::InvalidArgument, "non-finite scenario geometry");
    require_separated(ms, bs, "MS and BS");
    for (const auto &s : scatterers)
    {
        if (!s.finite())
            throw Error(ErrorCode::InvalidArgument, "non-finite scatterer");
        require_separated(s, bs, "scatterer and BS");
        require_separated(s, ms, "scatterer and MS");
    }
    if (los_blocked && scatterers.empty())
        throw Error(ErrorCode::InvalidArgument, "blocked LOS requires at least one scatterer");
}

std::vector<std::size_t> scatterer_order(const Scenario &s, double light_speed)
{
    std::vector<PathParams> nlos;
    nlos.reserve(s.scatterers.size());
    for (const auto &sc : s.scatterers)
        nlos.push_back(reflected_path(s.ms, s.rotation, sc, s.bs, light_speed));

    std::vector<std::size_t> order(s.scatterers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nlos[a].delay != nlos[b].delay)
            return nlos[a].delay < nlos[b].delay;
        return nlos[a].aod < nlos[b].aod;
    });
    return order;
}

ChannelParamSet channel_params_from_location(const LocationParams &loc, const Vec2 &bs, double light_speed)
{
    check_location(loc, bs);
    if (loc.gains.size() != loc.path_count())
        throw Error(ErrorCode::DimensionMismatch, "gain count does not match path count");

    const Vec2 &p = loc.pose.position;
    const double alpha = loc.pose.rotation;

    ChannelParamSet cp;
    cp.olos = loc.olos;
    cp.paths.reserve(loc.path_count());
    std::size_t g = 0;
    if (!loc.olos)
    {
        const Vec2 pq = p - bs;
        PathParams los;
        los.delay = pq.norm() / light_speed;
        los.aod = pq.angle();
        los.aoa = pi + los.aod - alpha;
        los.gain = loc.gains[g++];
        cp.paths.push_back(los);
    }
    for (const auto &s : loc.scatterers)
    {
        PathParams path = reflected_path(p, alpha, s, bs, light_speed);
        path.gain = loc.gains[g++];
        cp.paths.push_back(path);
    }
    return cp;
}

LocationParams location_from_scenario(const Scenario &s, const std::vector<cdouble> &gains, double light_speed)
{
    s.validate();
    if (gains.size() != s.path_count())
        throw Error(ErrorCode::DimensionMismatch, "gains length must equal the number of paths");

    LocationParams loc;
    loc.pose = {s.ms, s.rotation};
    loc.olos = s.los_blocked;
    const std::size_t offset = s.los_blocked ? 0 : 1;
    if (!s.los_blocked)
        loc.gains.push_back(gains[0]);
    for (std::size_t idx : scatterer_order(s, light_speed))
    {
        loc.scatterers.push_back(s.scatterers[idx]);
        loc.gains.push_back(gains[offset + idx]);
    }
    return loc;
}

ChannelParamSet params_from_scenario(const Scenario &s, const std::vector<cdouble> &gains, double light_speed)
{
    return channel_params_from_location(location_from_scenario(s, gains, light_speed), s.bs, light_speed);
}

Eigen::MatrixXd transformation_matrix(const LocationParams &loc, const Vec2 &bs, double light_speed)
{
    check_location(loc, bs);
    const std::size_t n_sc = loc.scatterers.size();
    const std::size_t n_paths = loc.path_count();
    const double c = light_speed;
    const Vec2 &p = loc.pose.position;

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(location_dim(n_sc, loc.olos), channel_dim(n_paths));

    // Row offsets in the location vector.
    constexpr Eigen::Index kPx = 0, kPy = 1, kAlpha = 2;
    Eigen::Index col = 0;
    Eigen::Index row = 3;

    if (!loc.olos)
    {
        const Vec2 pq = p - bs;
        const double d0 = pq.norm();
        const double th = pq.angle();
        const double ct = std::cos(th), st = std::sin(th);
        // tau_0
        T(kPx, col + 0) = ct / c;
        T(kPy, col + 0) = st / c;
        // aod_0
        T(kPx, col + 1) = -st / d0;
        T(kPy, col + 1) = ct / d0;
        // aoa_0 = pi + aod_0 - alpha
        T(kPx, col + 2) = -st / d0;
        T(kPy, col + 2) = ct / d0;
        T(kAlpha, col + 2) = -1.0;
        // gains
        T(row + 0, col + 3) = 1.0;
        T(row + 1, col + 4) = 1.0;
        row += 2;
        col += 5;
    }

    for (const auto &s : loc.scatterers)
    {
        const Vec2 sq = s - bs;
        const Vec2 ps = p - s;
        const double d1 = sq.norm();
        const double d2 = ps.norm();
        const double th = sq.angle();
        const double phi = ps.angle();
        const double ct = std::cos(th), st = std::sin(th);
        const double cp = std::cos(phi), sp = std::sin(phi);

        // tau_k w.r.t. p and s_k
        T(kPx, col + 0) = cp / c;
        T(kPy, col + 0) = sp / c;
        T(row + 0, col + 0) = (ct - cp) / c;
        T(row + 1, col + 0) = (st - sp) / c;
        // aod_k depends on s_k only
        T(row + 0, col + 1) = -st / d1;
        T(row + 1, col + 1) = ct / d1;
        // aoa_k = pi + phi - alpha
        T(kPx, col + 2) = -sp / d2;
        T(kPy, col + 2) = cp / d2;
        T(row + 0, col + 2) = sp / d2;
        T(row + 1, col + 2) = -cp / d2;
        T(kAlpha, col + 2) = -1.0;
        // gains
        T(row + 2, col + 3) = 1.0;
        T(row + 3, col + 4) = 1.0;
        row += 4;
        col += 5;
    }
    return T;
}

Eigen::MatrixXd transformation_matrix(const Scenario &s, double light_speed)
{
    std::vector<cdouble> unit(s.path_count(), cdouble{1.0, 0.0});
    return transformation_matrix(location_from_scenario(s, unit, light_speed), s.bs, light_speed);
}

ChannelParamSet olos_param_subset(const ChannelParamSet &cp)
{
    if (cp.olos)
        return cp;
    if (cp.paths.size() < 2)
        throw Error(ErrorCode::EmptyParamSet, "no NLOS path remains after removing the LOS path");
    ChannelParamSet out;
    out.olos = true;
    out.paths.assign(cp.paths.begin() + 1, cp.paths.end());
    return out;
}

Eigen::VectorXd channel_vector(const ChannelParamSet &cp)
{
    Eigen::VectorXd v(channel_dim(cp.paths.size()));
    for (std::size_t k = 0; k < cp.paths.size(); ++k)
    {
        const auto &path = cp.paths[k];
        v.segment<5>(5 * k) << path.delay, path.aod, path.aoa, path.gain.real(), path.gain.imag();
    }
    return v;
}

ChannelParamSet channel_from_vector(const Eigen::VectorXd &v, bool olos)
{
    if (v.size() % 5 != 0)
        throw Error(ErrorCode::DimensionMismatch, "channel vector length must be a multiple of 5");
    ChannelParamSet cp;
    cp.olos = olos;
    for (Eigen::Index k = 0; k < v.size() / 5; ++k)
        cp.paths.push_back({v(5 * k), v(5 * k + 1), v(5 * k + 2), cdouble(v(5 * k + 3), v(5 * k + 4))});
    return cp;
}

Eigen::VectorXd location_vector(const LocationParams &loc)
{
    Eigen::VectorXd v(location_dim(loc.scatterers.size(), loc.olos));
    v(0) = loc.pose.position.x;
    v(1) = loc.pose.position.y;
    v(2) = loc.pose.rotation;
    Eigen::Index i = 3;
    std::size_t g = 0;
    if (!loc.olos)
    {
        v(i++) = loc.gains.at(g).real();
        v(i++) = loc.gains.at(g).imag();
        ++g;
    }
    for (const auto &s : loc.scatterers)
    {
        v(i++) = s.x;
        v(i++) = s.y;
        v(i++) = loc.gains.at(g).real();
        v(i++) = loc.gains.at(g).imag();
        ++g;
    }
    return v;
}

LocationParams location_from_vector(const Eigen::VectorXd &v, bool olos)
{
    const Eigen::Index body = v.size() - 3 - (olos ? 0 : 2);
    if (v.size() < 3 || body < 0 || body % 4 != 0)
        throw Error(ErrorCode::DimensionMismatch, "invalid location vector length");
    LocationParams loc;
    loc.olos = olos;
    loc.pose = {{v(0), v(1)}, v(2)};
    Eigen::Index i = 3;
    if (!olos)
    {
        loc.gains.emplace_back(v(i), v(i + 1));
        i += 2;
    }
    while (i < v.size())
    {
        loc.scatterers.push_back({v(i), v(i + 1)});
        loc.gains.emplace_back(v(i + 2), v(i + 3));
        i += 4;
    }
    return loc;
}

} // namespace mmwloc
