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

#include "mmwloc/somp.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace mmwloc
{

namespace
{

cdouble inner(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    return (a.conjugate().cwiseProduct(b)).sum(); // <a, b> = a^H b
}

// Column m of Omega[n] arranged N_r x G.
Eigen::MatrixXcd atom_matrix(const SensingSet &s, int n, Eigen::Index m)
{
    const Eigen::Index nr = s.u_rx.cols();
    return s.u_rx.col(m % nr) * s.z_tx[n].row(m / nr);
}

} // namespace

double stopping_threshold(double noise_psd, int n_subcarriers, int n_rx, int n_tx, double p_fa)
{
    if (!(p_fa > 0.0 && p_fa < 1.0))
        throw Error(ErrorCode::InvalidArgument, "false-alarm probability must lie in (0, 1)");
    if (n_subcarriers < 1 || n_rx < 1 || n_tx < 1)
        throw Error(ErrorCode::InvalidArgument, "dimensions must be positive");
    const double level = std::pow(1.0 - p_fa, 1.0 / (static_cast<double>(n_rx) * n_tx));
    return noise_psd * boost::math::gamma_p_inv(static_cast<double>(n_subcarriers), level);
}

StopRule make_stop_rule(double noise_psd, const ArrayOfdmConfig &cfg, double p_fa)
{
    return {stopping_threshold(noise_psd, cfg.n_subcarriers, cfg.n_rx, cfg.n_tx, p_fa), p_fa};
}

int default_max_paths(const SensingSet &sensing)
{
    return std::min(sensing.n_transmissions() * static_cast<int>(sensing.u_rx.cols()), 20);
}

Eigen::MatrixXd atom_scores(const SensingSet &sensing, const std::vector<Eigen::MatrixXcd> &residual)
{
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(sensing.u_rx.cols(), sensing.u_tx.cols());
    for (int n = 0; n < sensing.n_subcarriers(); ++n)
    {
        const Eigen::MatrixXd energy = sensing.column_energy(n);
        const Eigen::MatrixXd corr = sensing.correlate(n, residual[n]).cwiseAbs();
        for (Eigen::Index j = 0; j < scores.cols(); ++j)
            for (Eigen::Index i = 0; i < scores.rows(); ++i)
                if (energy(i, j) > 0.0)
                    scores(i, j) += corr(i, j) / std::sqrt(energy(i, j));
    }
    return scores;
}

Eigen::Index best_atom(const Eigen::MatrixXd &scores, const std::vector<bool> &excluded)
{
    Eigen::Index best = -1;
    double best_score = -1.0;
    const Eigen::Index nr = scores.rows();
    for (Eigen::Index m = 0; m < scores.size(); ++m)
    {
        if (!excluded.empty() && excluded[m])
            continue;
        const double v = scores(m % nr, m / nr);
        if (v > best_score)
        {
            best_score = v;
            best = m;
        }
    }
    return best;
}

CoarsePath atom_path(const SensingSet &sensing, Eigen::Index column)
{
    const auto nr = static_cast<int>(sensing.u_rx.cols());
    CoarsePath p;
    p.column = column;
    p.tx_index = static_cast<int>(column / nr);
    p.rx_index = static_cast<int>(column % nr);
    p.aod = grid_angle(p.tx_index, sensing.cfg.n_tx, sensing.cfg);
    p.aoa = grid_angle(p.rx_index, sensing.cfg.n_rx, sensing.cfg);
    return p;
}

CoarseEstimate dcs_somp(const SensingSet &sensing, const StopRule &stop, int max_paths)
{
    const int N = sensing.n_subcarriers();
    if (N == 0 || sensing.n_transmissions() == 0)
        throw Error(ErrorCode::DimensionMismatch, "empty sensing set");
    if (!(stop.delta >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "threshold must be non-negative");
    const int cap = max_paths > 0 ? max_paths : default_max_paths(sensing);

    CoarseEstimate out;
    std::vector<Eigen::MatrixXcd> residual = sensing.y;
    std::vector<std::vector<Eigen::MatrixXcd>> basis(N);     // orthogonalized atoms rho_t[n]
    std::vector<Eigen::MatrixXcd> R(N, Eigen::MatrixXcd::Zero(cap, cap));
    std::vector<Eigen::VectorXcd> beta(N, Eigen::VectorXcd::Zero(cap));
    std::vector<bool> excluded(sensing.n_columns(), false);
    std::vector<Eigen::Index> support;

    double energy = 0.0;
    for (const auto &r : residual)
        energy += r.squaredNorm();
    out.residual_energy.push_back(energy);

    while (static_cast<int>(support.size()) < cap)
    {
        const Eigen::Index m = best_atom(atom_scores(sensing, residual), excluded);
        if (m < 0)
            break;
        const auto t = static_cast<Eigen::Index>(support.size());

        std::vector<Eigen::MatrixXcd> rho(N);
        std::vector<cdouble> b(N);
        Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(t + 1, N);
        double removed = 0.0;
        for (int n = 0; n < N; ++n)
        {
            const Eigen::MatrixXcd omega = atom_matrix(sensing, n, m);
            Eigen::MatrixXcd v = omega;
            // Two Gram-Schmidt passes for numerical orthogonality.
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index i = 0; i < t; ++i)
                {
                    const double nrm = basis[n][i].squaredNorm();
                    if (nrm <= 0.0)
                        continue;
                    const cdouble c = inner(basis[n][i], v) / nrm;
                    coeff(i, n) += c;
                    v -= c * basis[n][i];
                }
            coeff(t, n) = 1.0;
            const double vn = v.squaredNorm();
            cdouble bn{0.0, 0.0};
            if (vn > 1e-24 * std::max(omega.squaredNorm(), 1e-300))
                bn = inner(v, residual[n]) / vn;
            else
                v.setZero();
            removed += std::norm(bn) * v.squaredNorm();
            rho[n] = std::move(v);
            b[n] = bn;
        }
        excluded[m] = true;
        if (removed <= stop.delta)
            break;

        support.push_back(m);
        out.removed_energy.push_back(removed);
        energy = 0.0;
        for (int n = 0; n < N; ++n)
        {
            residual[n] -= b[n] * rho[n];
            energy += residual[n].squaredNorm();
            basis[n].push_back(std::move(rho[n]));
            R[n].col(t).head(t + 1) = coeff.col(n);
            beta[n](t) = b[n];
        }
        out.residual_energy.push_back(energy);
    }

    if (support.empty())
        throw Error(ErrorCode::NoPathDetected, "no atom exceeded the detection threshold");

    const auto K = static_cast<Eigen::Index>(support.size());
    for (Eigen::Index k = 0; k < K; ++k)
    {
        CoarsePath p = atom_path(sensing, support[k]);
        p.beam_gains.resize(N);
        out.paths.push_back(std::move(p));
    }
    for (int n = 0; n < N; ++n)
    {
        const Eigen::VectorXcd h =
            R[n].topLeftCorner(K, K).triangularView<Eigen::Upper>().solve(beta[n].head(K));
        for (Eigen::Index k = 0; k < K; ++k)
            out.paths[k].beam_gains(n) = h(k);
    }
    out.residual = std::move(residual);
    return out;
}

cdouble narrowband_kernel(const SensingSet &sensing, const CoarsePath &path)
{
    ArrayOfdmConfig nb = sensing.cfg;
    nb.narrowband = true;
    const cdouble rx = sensing.u_rx.col(path.rx_index).dot(steering_vector(ArraySide::Rx, nb, path.aoa, 0));
    const cdouble tx = steering_vector(ArraySide::Tx, nb, path.aod, 0).dot(sensing.u_tx.col(path.tx_index));
    return rx * tx;
}

double delay_search(const Eigen::VectorXcd &beam_gains, const ArrayOfdmConfig &cfg)
{
    const int N = cfg.n_subcarriers;
    if (beam_gains.size() != N)
        throw Error(ErrorCode::DimensionMismatch, "beam gains must have one entry per subcarrier");
    const int points = 10 * N;
    const double span = N * cfg.sample_period();
    const double step = span / points;

    auto objective = [&](double tau) {
        cdouble acc{0.0, 0.0};
        for (int n = 0; n < N; ++n)
            acc += std::polar(1.0, cfg.delay_phase_rate(n) * tau) * beam_gains(n);
        return std::norm(acc);
    };

    std::vector<double> values(points);
    int best = 0;
    for (int j = 0; j < points; ++j)
    {
        values[j] = objective(j * step);
        if (values[j] > values[best])
            best = j;
    }
    const double left = values[(best + points - 1) % points];
    const double mid = values[best];
    const double right = values[(best + 1) % points];
    const double curvature = left - 2.0 * mid + right;
    double offset = 0.0;
    if (curvature < 0.0)
        offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
    double tau = (best + offset) * step;
    tau = std::fmod(tau, span);
    if (tau < 0.0)
        tau += span;
    return tau;
}

void delay_gain_from_beam(CoarsePath &path, const SensingSet &sensing)
{
    const ArrayOfdmConfig &cfg = sensing.cfg;
    const cdouble z = narrowband_kernel(sensing, path);
    if (std::abs(z) < 1e-12)
        throw Error(ErrorCode::ZeroKernel, "beamspace kernel vanishes for this path");
    path.delay = delay_search(path.beam_gains, cfg);
    cdouble acc{0.0, 0.0};
    for (int n = 0; n < cfg.n_subcarriers; ++n)
        acc += std::polar(1.0, cfg.delay_phase_rate(n) * path.delay) * path.beam_gains(n);
    path.gain = acc / (z * static_cast<double>(cfg.n_subcarriers));
}

void per_path_delay_gain(CoarseEstimate &coarse, const SensingSet &sensing)
{
    for (auto &p : coarse.paths)
        delay_gain_from_beam(p, sensing);
}

} // namespace mmwloc
