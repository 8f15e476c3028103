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

#ifndef MMWLOC_SOMP_HPP
#define MMWLOC_SOMP_HPP

#include "mmwloc/beamspace.hpp"

namespace mmwloc
{

struct StopRule
{
    double delta = 0.0; // residual-energy change threshold
    double p_fa = 1e-3;
};

// delta = N_0 * Q^{-1}(N, (1 - p_fa)^(1/(N_r N_t))) with Q the regularized lower incomplete gamma function.
double stopping_threshold(double noise_psd, int n_subcarriers, int n_rx, int n_tx, double p_fa);

StopRule make_stop_rule(double noise_psd, const ArrayOfdmConfig &cfg, double p_fa);

struct CoarsePath
{
    int tx_index = 0;       // 0-based virtual-angle column
    int rx_index = 0;
    Eigen::Index column = 0; // tx_index * N_r + rx_index
    double aod = 0.0;        // arcsin domain
    double aoa = 0.0;        // arcsin domain
    double delay = 0.0;
    cdouble gain{0.0, 0.0};
    Eigen::VectorXcd beam_gains; // beamspace coefficient per subcarrier
};

struct CoarseEstimate
{
    std::vector<CoarsePath> paths;
    std::vector<double> residual_energy;  // sum_n ||r_t[n]||^2 for t = 0 .. number of kept atoms
    std::vector<double> removed_energy;   // energy removed by each kept atom
    std::vector<Eigen::MatrixXcd> residual; // final residual per subcarrier (N_r x G)
};

// Default cap on the number of selected atoms, min(G * N_r, 20).
int default_max_paths(const SensingSet &sensing);

// Modified DCS-SOMP. Throws NoPathDetected when the first atom does not pass the threshold.
// `max_paths` <= 0 selects `default_max_paths`.
CoarseEstimate dcs_somp(const SensingSet &sensing, const StopRule &stop, int max_paths = 0);

// Matched-filter score sum_n |omega_m^H r[n]| / ||omega_m[n]|| for every column, arranged N_r x N_t.
Eigen::MatrixXd atom_scores(const SensingSet &sensing, const std::vector<Eigen::MatrixXcd> &residual);

// Lowest linear index m = i_tx * N_r + i_rx maximizing `scores`, skipping `excluded` columns; -1 if none.
Eigen::Index best_atom(const Eigen::MatrixXd &scores, const std::vector<bool> &excluded);

// Grid angles of an atom.
CoarsePath atom_path(const SensingSet &sensing, Eigen::Index column);

// Narrowband beamspace kernel of a path at its grid column: u_rx^H a_rx(aoa) a_tx^H(aod) u_tx at lambda_c.
cdouble narrowband_kernel(const SensingSet &sensing, const CoarsePath &path);

// Delay and gain of every path from its beamspace coefficients. Throws ZeroKernel.
void per_path_delay_gain(CoarseEstimate &coarse, const SensingSet &sensing);
void delay_gain_from_beam(CoarsePath &path, const SensingSet &sensing);

// Delay maximizing |a(tau)^H h|^2 on a grid of 10 N points over [0, N T_s) with parabolic refinement.
double delay_search(const Eigen::VectorXcd &beam_gains, const ArrayOfdmConfig &cfg);

} // namespace mmwloc

#endif
