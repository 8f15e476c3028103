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

#include "mmwloc/lma.hpp"

#include <cmath>

namespace mmwloc
{

Eigen::MatrixXd numeric_jacobian(const ResidualFn &residual, const Eigen::VectorXd &x, const Eigen::VectorXd &scale)
{
    const Eigen::VectorXd r0 = residual(x);
    Eigen::MatrixXd J(r0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        const double s = scale.size() == x.size() ? scale(i) : std::max(1.0, std::abs(x(i)));
        const double h = 1e-6 * s;
        xp(i) = x(i) + h;
        const Eigen::VectorXd rp = residual(xp);
        xp(i) = x(i) - h;
        const Eigen::VectorXd rm = residual(xp);
        xp(i) = x(i);
        J.col(i) = (rp - rm) / (2.0 * h);
    }
    return J;
}

LmaResult lma_minimize(const ResidualFn &residual, const Eigen::MatrixXd &weight, const Eigen::VectorXd &x0,
                       const LmaOptions &opts, const JacobianFn &jacobian)
{
    auto cost_of = [&](const Eigen::VectorXd &r) { return r.dot(weight * r); };

    LmaResult out;
    out.x = x0;
    Eigen::VectorXd r = residual(x0);
    if (weight.rows() != r.size() || weight.cols() != r.size())
        throw Error(ErrorCode::DimensionMismatch, "weight does not match the residual length");
    out.cost = cost_of(r);
    if (!std::isfinite(out.cost))
        throw Error(ErrorCode::NonFinite, "initial cost is not finite");
    out.accepted_costs.push_back(out.cost);
    double lambda = opts.initial_damping;

    auto jac = [&](const Eigen::VectorXd &x) {
        return jacobian ? jacobian(x) : numeric_jacobian(residual, x, opts.fd_scale);
    };

    Eigen::MatrixXd J = jac(out.x);
    bool stationary = false;
    for (int it = 0; it < opts.max_iters; ++it)
    {
        out.iterations = it + 1;
        const Eigen::MatrixXd WJ = weight * J;
        const Eigen::MatrixXd A = J.transpose() * WJ;
        const Eigen::VectorXd grad = WJ.transpose() * r; // half the cost gradient
        Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-300);
        // Gradient test in Marquardt-scaled coordinates, relative to the cost.
        const double scaled_grad = (grad.array() / diag.array().sqrt()).abs().maxCoeff();
        if (!(scaled_grad > opts.gradient_tol * std::sqrt(std::max(out.cost, 1e-300))) || out.cost == 0.0)
        {
            stationary = true;
            out.converged = true;
            break;
        }

        Eigen::MatrixXd M = A;
        M.diagonal() += lambda * diag;
        const Eigen::VectorXd step = M.ldlt().solve(-grad);
        if (!step.allFinite())
        {
            lambda *= opts.damping_up;
            continue;
        }
        const Eigen::VectorXd x_new = out.x + step;
        const Eigen::VectorXd r_new = residual(x_new);
        const double c_new = cost_of(r_new);
        if (std::isfinite(c_new) && c_new < out.cost)
        {
            const double change = (out.cost - c_new) / std::max(out.cost, 1e-300);
            out.x = x_new;
            r = r_new;
            out.cost = c_new;
            out.accepted_costs.push_back(c_new);
            ++out.accepted_steps;
            lambda = std::max(lambda / opts.damping_down, 1e-15);
            const double step_rel = step.norm() / std::max(out.x.norm(), 1e-300);
            if (step_rel < opts.step_tol || change < opts.cost_tol)
            {
                out.converged = true;
                break;
            }
            J = jac(out.x);
        }
        else
        {
            lambda *= opts.damping_up;
            // Step already negligible at this damping: the point is numerically stationary.
            if (step.norm() < opts.step_tol * std::max(out.x.norm(), 1e-300))
            {
                out.converged = true;
                break;
            }
        }
    }
    out.damping = lambda;
    if (!out.converged && !stationary && out.accepted_steps == 0)
        throw Error(ErrorCode::LmDiverged, "no cost decrease within the iteration budget");
    return out;
}

} // namespace mmwloc
