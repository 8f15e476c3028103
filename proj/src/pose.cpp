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

#include "mmwloc/pose.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mmwloc
{

using std::numbers::pi;

const char *to_string(PoseBranch b)
{
    switch (b)
    {
    case PoseBranch::Los: return "los";
    case PoseBranch::Nlos: return "nlos";
    case PoseBranch::Olos: return "olos";
    }
    return "unknown";
}

void OlosSearchConfig::validate() const
{
    if (!(delta_alpha > 0.0) || !(delta_alpha <= alpha_max))
        throw Error(ErrorCode::InvalidArgument, "rotation search requires 0 < delta_alpha <= alpha_max");
}

Pose solve_los(const PathParams &path0, const Vec2 &bs, double light_speed)
{
    Pose pose;
    pose.position = bs + unit_vector(path0.aod) * (light_speed * path0.delay);
    pose.rotation = wrap_two_pi(pi + path0.aod - path0.aoa);
    return pose;
}

Eigen::VectorXd exip_residual(const ChannelParamSet &eta_hat, const LocationParams &loc, const Vec2 &bs,
                              double light_speed)
{
    const Eigen::VectorXd model = channel_vector(channel_params_from_location(loc, bs, light_speed));
    const Eigen::VectorXd target = channel_vector(eta_hat);
    if (model.size() != target.size())
        throw Error(ErrorCode::DimensionMismatch, "hypothesis and estimate differ in path count");
    Eigen::VectorXd r = target - model;
    for (Eigen::Index k = 0; k < r.size() / 5; ++k)
    {
        r(5 * k + 1) = wrap_pi(r(5 * k + 1));
        r(5 * k + 2) = wrap_pi(r(5 * k + 2));
    }
    return r;
}

double exip_cost(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const LocationParams &loc,
                 const Vec2 &bs, double light_speed)
{
    const Eigen::VectorXd r = exip_residual(eta_hat, loc, bs, light_speed);
    return r.dot(weight * r);
}

Vec2 intersect_rays(const Vec2 &origin_a, double angle_a, const Vec2 &origin_b, double angle_b)
{
    const Vec2 u = unit_vector(angle_a);
    const Vec2 v = unit_vector(angle_b);
    const Vec2 w = origin_b - origin_a;
    // origin_a + a u = origin_b + b v
    const double det = -u.x * v.y + u.y * v.x;
    if (std::abs(det) > 1e-9)
    {
        const double a = (-w.x * v.y + w.y * v.x) / det;
        return origin_a + u * a;
    }
    // Closest points of the two rays.
    const double a = std::max(0.0, w.x * u.x + w.y * u.y);
    const double b = std::max(0.0, -(w.x * v.x + w.y * v.y));
    const Vec2 pa = origin_a + u * a;
    const Vec2 pb = origin_b + v * b;
    return (pa + pb) * 0.5;
}

Vec2 initial_scatterer(const PathParams &path, const Pose &pose, const Vec2 &bs, double light_speed)
{
    const double rx_dir = path.aoa + pose.rotation; // direction from the MS towards the scatterer
    const Vec2 u = unit_vector(path.aod);
    const Vec2 v = unit_vector(rx_dir);
    const Vec2 w = pose.position - bs;
    const double det = -u.x * v.y + u.y * v.x;
    if (std::abs(det) > 1e-9)
    {
        const double a = (-w.x * v.y + w.y * v.x) / det;
        const double b = (u.x * w.y - u.y * w.x) / det;
        if (a > 0.0 && b > 0.0)
            return bs + u * a;
    }
    else
        return intersect_rays(bs, path.aod, pose.position, rx_dir);
    // Point on the AOD ray whose bounce length matches the delay.
    const double len = light_speed * path.delay;
    const double den = 2.0 * (len - (u.x * w.x + u.y * w.y));
    const double a = std::abs(den) > 1e-12 ? (len * len - w.norm() * w.norm()) / den : 0.5 * len;
    return bs + u * std::max(a, 1e-3);
}

namespace
{

PoseSolution run_exip(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                      const LocationParams &init, double light_speed, const LmaOptions &opts)
{
    const bool olos = init.olos;
    auto residual = [&](const Eigen::VectorXd &x) -> Eigen::VectorXd {
        try
        {
            return exip_residual(eta_hat, location_from_vector(x, olos), bs, light_speed);
        }
        catch (const Error &)
        {
            return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(5 * eta_hat.size()),
                                             std::numeric_limits<double>::infinity());
        }
    };
    auto jacobian = [&](const Eigen::VectorXd &x) -> Eigen::MatrixXd {
        return -transformation_matrix(location_from_vector(x, olos), bs, light_speed).transpose();
    };
    const LmaResult res = lma_minimize(residual, weight, location_vector(init), opts, jacobian);
    const LocationParams loc = location_from_vector(res.x, olos);

    PoseSolution sol;
    sol.pose = {loc.pose.position, wrap_two_pi(loc.pose.rotation)};
    sol.scatterers = loc.scatterers;
    sol.gains = loc.gains;
    sol.cost = res.cost;
    sol.branch = olos ? PoseBranch::Olos : PoseBranch::Nlos;
    sol.iterations = res.iterations;
    sol.damping = res.damping;
    return sol;
}

void check_weight(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight)
{
    const auto dim = static_cast<Eigen::Index>(5 * eta_hat.size());
    if (weight.rows() != dim || weight.cols() != dim)
        throw Error(ErrorCode::DimensionMismatch, "weight does not match the channel estimate");
}

} // namespace

PoseSolution solve_nlos(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                        double light_speed, const LmaOptions &opts)
{
    if (eta_hat.size() < 2)
        throw Error(ErrorCode::InsufficientPaths, "NLOS solution needs a LOS path and at least one reflection");
    check_weight(eta_hat, weight);
    ChannelParamSet hyp = eta_hat;
    hyp.olos = false;

    LocationParams init;
    init.olos = false;
    init.pose = solve_los(hyp.paths[0], bs, light_speed);
    for (const auto &p : hyp.paths)
        init.gains.push_back(p.gain);
    for (std::size_t k = 1; k < hyp.size(); ++k)
        init.scatterers.push_back(initial_scatterer(hyp.paths[k], init.pose, bs, light_speed));
    return run_exip(hyp, weight, bs, init, light_speed, opts);
}

PoseSolution solve_olos(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                        const OlosSearchConfig &search, double light_speed, const LmaOptions &opts)
{
    search.validate();
    if (eta_hat.size() < 3)
        throw Error(ErrorCode::InsufficientPaths, "at least three reflected paths are needed without LOS");
    check_weight(eta_hat, weight);
    ChannelParamSet hyp = eta_hat;
    hyp.olos = true;
    const double c = light_speed;

    // The two strongest paths seed the linear solution.
    std::vector<std::size_t> order(hyp.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(hyp.paths[a].gain) > std::abs(hyp.paths[b].gain); });
    const std::size_t k1 = order[0];
    const std::size_t k2 = order[1];

    const int steps = static_cast<int>(std::floor(search.alpha_max / search.delta_alpha + 1e-9));
    PoseSolution best;
    bool found = false;
    for (int i = -steps; i <= steps; ++i)
    {
        const double alpha = i * search.delta_alpha;
        // p - d_k (u_tx,k - v_k) = q + c tau_k v_k with v_k the unit vector from scatterer k to the MS.
        Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
        Eigen::Vector4d rhs;
        const std::size_t pair[2] = {k1, k2};
        for (int j = 0; j < 2; ++j)
        {
            const PathParams &p = hyp.paths[pair[j]];
            const Vec2 ut = unit_vector(p.aod);
            const Vec2 v = unit_vector(p.aoa + alpha) * -1.0;
            A(2 * j, 0) = 1.0;
            A(2 * j + 1, 1) = 1.0;
            A(2 * j, 2 + j) = -(ut.x - v.x);
            A(2 * j + 1, 2 + j) = -(ut.y - v.y);
            rhs(2 * j) = bs.x + c * p.delay * v.x;
            rhs(2 * j + 1) = bs.y + c * p.delay * v.y;
        }
        const Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        if (lu.rank() < 4 || std::abs(lu.determinant()) < 1e-12)
            continue; // singular trial
        const Eigen::Vector4d sol = lu.solve(rhs);
        if (!sol.allFinite())
            continue;

        LocationParams init;
        init.olos = true;
        init.pose = {{sol(0), sol(1)}, alpha};
        for (std::size_t k = 0; k < hyp.size(); ++k)
        {
            init.gains.push_back(hyp.paths[k].gain);
            if (k == k1)
                init.scatterers.push_back(bs + unit_vector(hyp.paths[k].aod) * sol(2));
            else if (k == k2)
                init.scatterers.push_back(bs + unit_vector(hyp.paths[k].aod) * sol(3));
            else
                init.scatterers.push_back(initial_scatterer(hyp.paths[k], init.pose, bs, c));
        }
        try
        {
            PoseSolution trial = run_exip(hyp, weight, bs, init, c, opts);
            if (!found || trial.cost < best.cost)
            {
                best = std::move(trial);
                found = true;
            }
        }
        catch (const Error &)
        {
            // degenerate or diverged trial: skipped
        }
    }
    if (!found)
        throw Error(ErrorCode::SingularLinearSystem, "no rotation trial produced a valid solution");
    return best;
}

UnknownSolution solve_unknown(const ChannelParamSet &eta_hat, const Eigen::MatrixXd &weight, const Vec2 &bs,
                              const OlosSearchConfig &search, double light_speed, const LmaOptions &opts)
{
    if (eta_hat.size() < 3)
        throw Error(ErrorCode::InsufficientPaths, "condition selection needs at least three paths");
    UnknownSolution out;
    out.nlos = solve_nlos(eta_hat, weight, bs, light_speed, opts);
    out.olos = solve_olos(eta_hat, weight, bs, search, light_speed, opts);
    out.delta_v = out.olos.cost > 0.0 ? out.nlos.cost / out.olos.cost : std::numeric_limits<double>::infinity();
    // A scatterer on the MS-BS segment reproduces the LOS path, so the OLOS hypothesis nests the NLOS one.
    // Costs at round-off level relative to the weighted data energy are ties; those go to NLOS (fewer unknowns).
    const Eigen::VectorXd eta = channel_vector(eta_hat);
    const double floor = kCostTieTolerance * std::abs(eta.dot(weight * eta));
    const bool tie = out.nlos.cost <= floor && out.olos.cost <= floor;
    out.best = (tie || out.nlos.cost <= out.olos.cost) ? out.nlos : out.olos;
    return out;
}

} // namespace mmwloc
