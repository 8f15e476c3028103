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

#ifndef MMWLOC_SAGE_HPP
#define MMWLOC_SAGE_HPP

#include "mmwloc/somp.hpp"

namespace mmwloc
{

struct RefineConfig
{
    int max_outer_iters = 30;
    double angle_bracket_bins = 1.0;  // half-width of the sine-domain search, in virtual-angle bins
    double delay_bracket_steps = 1.0; // half-width of the delay search, in delay-grid steps (T_s / 10)
    int line_search_bits = 40;        // requested precision of the 1-D searches (clamped by Brent)
    std::uintmax_t line_search_max_evals = 100;
    double tolerance = 1e-8;          // relative residual-energy improvement per sweep
    bool record_trajectory = true;
};

struct RefinedEstimate
{
    std::vector<PathParams> paths;                // angles in the arcsin domain
    std::vector<std::vector<PathParams>> trajectory; // snapshot after every sweep (index 0 = initial)
    std::vector<double> residual_energy;          // ||y - sum_k mu_k||^2 per snapshot
    int iterations = 0;
};

// Model response of one path across all (n, g), arranged per n as N_r x G.
std::vector<Eigen::MatrixXcd> path_response(const PathParams &params, const SensingSet &sensing);

// Least-squares gain <response, residual> / ||response||^2. Throws ZeroResponse.
cdouble gain_update(const std::vector<Eigen::MatrixXcd> &residual, const std::vector<Eigen::MatrixXcd> &response);

// Residual y - sum_k mu(paths_k) per subcarrier.
std::vector<Eigen::MatrixXcd> model_residual(const std::vector<PathParams> &paths, const SensingSet &sensing);
double residual_energy(const std::vector<PathParams> &paths, const SensingSet &sensing);

// SAGE refinement: per path the hidden data y - sum_{l != k} mu_l is fitted by sequential 1-D searches over
// AOD, AOA and delay (gain profiled out), followed by the closed-form gain update. Throws NonFinite.
RefinedEstimate sage_refine(const std::vector<PathParams> &initial, const SensingSet &sensing,
                            const RefineConfig &rcfg = {});
RefinedEstimate sage_refine(const CoarseEstimate &coarse, const SensingSet &sensing, const RefineConfig &rcfg = {});

// Sine-domain width of one virtual-angle bin, (lambda_c / d) / N.
double angle_bin_width(int n_antennas, const ArrayOfdmConfig &cfg);

} // namespace mmwloc

#endif
