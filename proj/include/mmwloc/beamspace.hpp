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

#ifndef MMWLOC_BEAMSPACE_HPP
#define MMWLOC_BEAMSPACE_HPP

#include "mmwloc/channel.hpp"

namespace mmwloc
{

// Unitary virtual-angle transform. Column j is the array response at the virtual angle p_j / N with
// p_j = j - (N-1)/2, so even N uses the half-integer grid.
Eigen::MatrixXcd virtual_transform(int n_antennas);

// Virtual angle (d/lambda_c) sin(theta) of grid column j, and the matching physical angle in the arcsin
// domain. The arcsin argument is clamped to [-1, 1].
double grid_virtual_angle(int index, int n_antennas);
double grid_angle(int index, int n_antennas, const ArrayOfdmConfig &cfg);

// Dirichlet-type kernel sin(pi N phi) / (sqrt(N) sin(pi phi)), continuous at integer phi.
double dirichlet_kernel(double phi, int n_antennas);

// Entry (i_rx, i_tx) of U_rx^H H[n] U_tx through the kernel expression; indices are 0-based columns.
cdouble beamspace_channel_entry(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, int subcarrier, int i_rx,
                                int i_tx);

// Observations and pilots in the form consumed by the sparse estimator. The sensing matrix
// Omega[n] = [Z^(g)[n]^T kron U_rx]_g is kept implicit; column m = i_tx * N_r + i_rx.
struct SensingSet
{
    ArrayOfdmConfig cfg;
    Eigen::MatrixXcd u_rx;                 // N_r x N_r
    Eigen::MatrixXcd u_tx;                 // N_t x N_t
    std::vector<Eigen::MatrixXcd> z_tx;    // per n: N_t x G, column g = U_tx^H F x
    std::vector<Eigen::MatrixXcd> pilots;  // per n: N_t x G, column g = F x
    std::vector<Eigen::MatrixXcd> y;       // per n: N_r x G antenna-domain observations
    double noise_psd = 0.0;

    int n_subcarriers() const { return static_cast<int>(y.size()); }
    int n_transmissions() const { return y.empty() ? 0 : static_cast<int>(y.front().cols()); }
    Eigen::Index n_columns() const { return u_rx.cols() * u_tx.cols(); }

    // Column m of Omega[n], stacked over g (length G * N_r).
    Eigen::VectorXcd column(int n, Eigen::Index m) const;
    // Explicit Omega[n]; intended for tests and small problems.
    Eigen::MatrixXcd omega(int n) const;
    // Omega[n] vec(Hcheck), returned as N_r x G.
    Eigen::MatrixXcd apply(int n, const Eigen::MatrixXcd &h_check) const;
    // Matched-filter products omega_m^H r for every column m, arranged N_r x N_t (entry (i_rx, i_tx)).
    Eigen::MatrixXcd correlate(int n, const Eigen::MatrixXcd &residual) const;
    // ||omega_m[n]||^2 arranged N_r x N_t.
    Eigen::MatrixXd column_energy(int n) const;
    // Total observation energy.
    double energy() const;
};

// Throws DimensionMismatch.
SensingSet build_sensing(const ObservationSet &obs, const PilotBlock &pilots, const ArrayOfdmConfig &cfg);

} // namespace mmwloc

#endif
