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

#include "mmwloc/beamspace.hpp"

namespace mmwloc
{

using std::numbers::pi;

Eigen::MatrixXcd virtual_transform(int n_antennas)
{
    if (n_antennas < 1)
        throw Error(ErrorCode::InvalidArgument, "antenna count must be positive");
    const double centre = 0.5 * (n_antennas - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    Eigen::MatrixXcd U(n_antennas, n_antennas);
    for (int j = 0; j < n_antennas; ++j)
        for (int i = 0; i < n_antennas; ++i)
            U(i, j) = std::polar(scale, 2.0 * pi * (i - centre) * (j - centre) / n_antennas);
    return U;
}

double grid_virtual_angle(int index, int n_antennas)
{
    return (index - 0.5 * (n_antennas - 1)) / n_antennas;
}

double grid_angle(int index, int n_antennas, const ArrayOfdmConfig &cfg)
{
    const double s = cfg.carrier_wavelength() / cfg.element_spacing() * grid_virtual_angle(index, n_antennas);
    return std::asin(std::clamp(s, -1.0, 1.0));
}

double dirichlet_kernel(double phi, int n_antennas)
{
    const double den = std::sin(pi * phi);
    const double root = std::sqrt(static_cast<double>(n_antennas));
    if (std::abs(den) < 1e-12)
    {
        // Limit at integer phi: (-1)^((N-1) phi) sqrt(N).
        const long j = std::lround(phi);
        return ((static_cast<long>(n_antennas - 1) * j) % 2 == 0) ? root : -root;
    }
    return std::sin(pi * n_antennas * phi) / (root * den);
}

cdouble beamspace_channel_entry(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, int subcarrier, int i_rx,
                                int i_tx)
{
    const double ratio = cfg.element_spacing() / cfg.wavelength(subcarrier);
    const double w = cfg.delay_phase_rate(subcarrier);
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.n_tx) * cfg.n_rx);
    cdouble sum{0.0, 0.0};
    for (const auto &path : cp.paths)
    {
        const cdouble gamma = path.gain * std::polar(1.0, -w * path.delay);
        const double chi_r = dirichlet_kernel(ratio * std::sin(path.aoa) - grid_virtual_angle(i_rx, cfg.n_rx), cfg.n_rx);
        const double chi_t = dirichlet_kernel(ratio * std::sin(path.aod) - grid_virtual_angle(i_tx, cfg.n_tx), cfg.n_tx);
        sum += gamma * chi_r * chi_t * norm;
    }
    return sum;
}

Eigen::VectorXcd SensingSet::column(int n, Eigen::Index m) const
{
    const Eigen::Index nr = u_rx.cols();
    const Eigen::Index i_tx = m / nr;
    const Eigen::Index i_rx = m % nr;
    const Eigen::Index g_count = z_tx[n].cols();
    Eigen::VectorXcd out(g_count * nr);
    for (Eigen::Index g = 0; g < g_count; ++g)
        out.segment(g * nr, nr) = z_tx[n](i_tx, g) * u_rx.col(i_rx);
    return out;
}

Eigen::MatrixXcd SensingSet::omega(int n) const
{
    Eigen::MatrixXcd out(u_rx.rows() * n_transmissions(), n_columns());
    for (Eigen::Index m = 0; m < n_columns(); ++m)
        out.col(m) = column(n, m);
    return out;
}

Eigen::MatrixXcd SensingSet::apply(int n, const Eigen::MatrixXcd &h_check) const
{
    // Omega^(g) vec(Hc) = U_rx Hc z_g.
    return u_rx * h_check * z_tx[n];
}

Eigen::MatrixXcd SensingSet::correlate(int n, const Eigen::MatrixXcd &residual) const
{
    return u_rx.adjoint() * residual * z_tx[n].adjoint();
}

Eigen::MatrixXd SensingSet::column_energy(int n) const
{
    const Eigen::VectorXd tx = z_tx[n].cwiseAbs2().rowwise().sum();
    return Eigen::VectorXd::Ones(u_rx.cols()) * tx.transpose();
}

double SensingSet::energy() const
{
    double e = 0.0;
    for (const auto &m : y)
        e += m.squaredNorm();
    return e;
}

SensingSet build_sensing(const ObservationSet &obs, const PilotBlock &pilots, const ArrayOfdmConfig &cfg)
{
    if (obs.n_subcarriers != cfg.n_subcarriers || pilots.n_subcarriers != cfg.n_subcarriers ||
        obs.n_transmissions != pilots.n_transmissions ||
        obs.y.size() != static_cast<std::size_t>(obs.n_subcarriers) * obs.n_transmissions)
        throw Error(ErrorCode::DimensionMismatch, "observations, pilots and configuration disagree");

    SensingSet s;
    s.cfg = cfg;
    s.noise_psd = obs.noise_psd;
    s.u_rx = virtual_transform(cfg.n_rx);
    s.u_tx = virtual_transform(cfg.n_tx);
    const int G = obs.n_transmissions;
    for (int n = 0; n < cfg.n_subcarriers; ++n)
    {
        Eigen::MatrixXcd f(cfg.n_tx, G);
        Eigen::MatrixXcd y(cfg.n_rx, G);
        for (int g = 0; g < G; ++g)
        {
            f.col(g) = pilots.effective(g, n);
            const Eigen::VectorXcd &yg = obs.at(g, n);
            if (f.rows() != cfg.n_tx || yg.size() != cfg.n_rx)
                throw Error(ErrorCode::DimensionMismatch, "pilot or observation length mismatch");
            y.col(g) = yg;
        }
        s.z_tx.push_back(s.u_tx.adjoint() * f);
        s.pilots.push_back(std::move(f));
        s.y.push_back(std::move(y));
    }
    return s;
}

} // namespace mmwloc
