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

#ifndef MMWLOC_LMA_HPP
#define MMWLOC_LMA_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mmwloc/error.hpp"

namespace mmwloc
{

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd &)>;

struct LmaOptions
{
    int max_iters = 200;
    double gradient_tol = 1e-10; // on the scaled gradient
    double step_tol = 1e-12;     // relative step norm
    double cost_tol = 1e-15;     // relative cost change of an accepted step
    double initial_damping = 1e-3;
    double damping_up = 10.0;
    double damping_down = 10.0;
    // Per-parameter scale for central-difference steps; empty means max(1, |x_i|).
    Eigen::VectorXd fd_scale;
};

struct LmaResult
{
    Eigen::VectorXd x;
    double cost = 0.0;
    int iterations = 0;
    int accepted_steps = 0;
    double damping = 0.0;
    bool converged = false;
    std::vector<double> accepted_costs; // cost after the start and after every accepted step
};

// Minimizes r(x)^T W r(x) by Levenberg-Marquardt with Marquardt diagonal scaling. Without `jacobian`, central
// differences are used. Throws LmDiverged when no step improves a non-stationary start within the iteration
// budget, NonFinite when the initial cost is not finite.
LmaResult lma_minimize(const ResidualFn &residual, const Eigen::MatrixXd &weight, const Eigen::VectorXd &x0,
                       const LmaOptions &opts = {}, const JacobianFn &jacobian = {});

// Central-difference Jacobian d r / d x (rows: residuals).
Eigen::MatrixXd numeric_jacobian(const ResidualFn &residual, const Eigen::VectorXd &x, const Eigen::VectorXd &scale);

} // namespace mmwloc

#endif
