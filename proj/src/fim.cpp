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

#include "mmwloc/fim.hpp"

#include <sstream>

namespace mmwloc
{

namespace
{

Eigen::VectorXcd angle_derivative(ArraySide side, const ArrayOfdmConfig &cfg, double angle, int n,
                                  DerivativeOrigin origin)
{
    if (origin == DerivativeOrigin::Centered)
        return steering_derivative(side, cfg, angle, n);
    Eigen::VectorXcd a = steering_vector(side, cfg, angle, n);
    const double rate = 2.0 * std::numbers::pi * cfg.element_spacing() / cfg.wavelength(n) * std::cos(angle);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) *= cdouble(0.0, static_cast<double>(i) * rate);
    return a;
}

} // namespace

FimMatrix fim_channel_params(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                             double noise_psd, DerivativeOrigin origin)
{
    if (!(noise_psd > 0.0))
        throw Error(ErrorCode::InvalidArgument, "noise PSD must be positive");
    if (pilots.n_subcarriers != cfg.n_subcarriers)
        throw Error(ErrorCode::DimensionMismatch, "pilot block does not match the subcarrier count");
    bool any_pilot = false;
    for (const auto &x : pilots.symbols)
        any_pilot = any_pilot || x.squaredNorm() > 0.0;
    if (!any_pilot)
        throw Error(ErrorCode::SingularInput, "all pilots are zero");

    const auto n_paths = static_cast<Eigen::Index>(cp.size());
    const Eigen::Index dim = 5 * n_paths;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);

    std::vector<Eigen::VectorXcd> a_rx(n_paths), da_rx(n_paths), a_tx(n_paths), da_tx(n_paths);
    std::vector<cdouble> phase(n_paths);
    Eigen::MatrixXcd V(cfg.n_rx, dim);

    for (int n = 0; n < cfg.n_subcarriers; ++n)
    {
        const double w = cfg.delay_phase_rate(n);
        for (Eigen::Index k = 0; k < n_paths; ++k)
        {
            const auto &path = cp.paths[k];
            a_rx[k] = steering_vector(ArraySide::Rx, cfg, path.aoa, n);
            da_rx[k] = angle_derivative(ArraySide::Rx, cfg, path.aoa, n, origin);
            a_tx[k] = steering_vector(ArraySide::Tx, cfg, path.aod, n);
            da_tx[k] = angle_derivative(ArraySide::Tx, cfg, path.aod, n, origin);
            phase[k] = std::polar(1.0, -w * path.delay);
        }
        for (int g = 0; g < pilots.n_transmissions; ++g)
        {
            const Eigen::VectorXcd f = pilots.effective(g, n);
            for (Eigen::Index k = 0; k < n_paths; ++k)
            {
                const cdouble h = cp.paths[k].gain;
                const cdouble b = a_tx[k].dot(f);  // a_tx^H f
                const cdouble c = da_tx[k].dot(f); // (d a_tx)^H f
                const cdouble e = phase[k];
                V.col(5 * k + 0) = (cdouble(0.0, -w) * h * e * b) * a_rx[k];
                V.col(5 * k + 1) = (h * e * c) * a_rx[k];
                V.col(5 * k + 2) = (h * e * b) * da_rx[k];
                V.col(5 * k + 3) = (e * b) * a_rx[k];
                V.col(5 * k + 4) = (cdouble(0.0, 1.0) * e * b) * a_rx[k];
            }
            J.noalias() += (V.adjoint() * V).real();
        }
    }
    J *= 2.0 / noise_psd;
    J = 0.5 * (J + J.transpose()).eval();

    FimMatrix out;
    out.entries = std::move(J);
    out.domain = FimMatrix::Domain::Channel;
    out.n_paths = cp.size();
    out.olos = cp.olos;
    return out;
}

FimMatrix fim_location(const LocationParams &loc, const Vec2 &bs, const FimMatrix &fim_eta, double light_speed)
{
    const Eigen::MatrixXd T = transformation_matrix(loc, bs, light_speed);
    if (fim_eta.entries.rows() != T.cols() || fim_eta.entries.cols() != T.cols())
        throw Error(ErrorCode::DimensionMismatch, "channel FIM does not match the transformation matrix");
    FimMatrix out;
    out.entries = T * fim_eta.entries * T.transpose();
    out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
    out.domain = FimMatrix::Domain::Location;
    out.n_paths = loc.path_count();
    out.olos = loc.olos;
    return out;
}

FimMatrix fim_location(const Scenario &s, const FimMatrix &fim_eta, double light_speed)
{
    std::vector<cdouble> unit(s.path_count(), cdouble{1.0, 0.0});
    return fim_location(location_from_scenario(s, unit, light_speed), s.bs, fim_eta, light_speed);
}

FimInverse invert_fim(const Eigen::MatrixXd &fim)
{
    if (fim.rows() != fim.cols() || fim.rows() == 0)
        throw Error(ErrorCode::DimensionMismatch, "FIM must be square and non-empty");
    if (!fim.allFinite())
        throw Error(ErrorCode::NonFinite, "FIM has non-finite entries");
    const Eigen::Index n = fim.rows();
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (!(fim(i, i) > 0.0))
            throw Error(ErrorCode::SingularFim, "zero information on coordinate " + std::to_string(i));
        scale(i) = 1.0 / std::sqrt(fim(i, i));
    }
    const Eigen::MatrixXd S = scale.asDiagonal() * fim * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
    const Eigen::VectorXd &ev = eig.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= kMaxFimCondition))
    {
        std::ostringstream msg;
        msg << "condition number " << condition << " exceeds " << kMaxFimCondition;
        throw Error(ErrorCode::SingularFim, msg.str());
    }
    FimInverse out;
    out.condition = condition;
    const Eigen::MatrixXd Sinv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    out.inverse = scale.asDiagonal() * Sinv * scale.asDiagonal();
    return out;
}

double position_error_bound(const Eigen::MatrixXd &fim)
{
    const FimInverse inv = invert_fim(fim);
    return std::sqrt(inv.inverse(0, 0) + inv.inverse(1, 1));
}

BoundReport bounds(const FimMatrix &fim_loc)
{
    if (fim_loc.entries.rows() < 3)
        throw Error(ErrorCode::DimensionMismatch, "location FIM needs at least position and rotation");
    const FimInverse inv = invert_fim(fim_loc.entries);
    BoundReport r;
    r.peb = std::sqrt(inv.inverse(0, 0) + inv.inverse(1, 1));
    r.reb = std::sqrt(inv.inverse(2, 2));
    r.condition = inv.condition;
    return r;
}

void add_channel_crbs(BoundReport &report, const FimMatrix &fim_eta)
{
    const FimInverse inv = invert_fim(fim_eta.entries);
    const Eigen::Index n_paths = fim_eta.entries.rows() / 5;
    report.crb_delay.resize(n_paths);
    report.crb_aod.resize(n_paths);
    report.crb_aoa.resize(n_paths);
    for (Eigen::Index k = 0; k < n_paths; ++k)
    {
        report.crb_delay[k] = std::sqrt(inv.inverse(5 * k, 5 * k));
        report.crb_aod[k] = std::sqrt(inv.inverse(5 * k + 1, 5 * k + 1));
        report.crb_aoa[k] = std::sqrt(inv.inverse(5 * k + 2, 5 * k + 2));
    }
}

BoundReport scenario_bounds(const Scenario &s, const std::vector<cdouble> &gains, const ArrayOfdmConfig &cfg,
                            const PilotBlock &pilots, double noise_psd)
{
    const LocationParams loc = location_from_scenario(s, gains, cfg.light_speed);
    const ChannelParamSet cp = channel_params_from_location(loc, s.bs, cfg.light_speed);
    const FimMatrix fim_eta = fim_channel_params(cp, cfg, pilots, noise_psd);
    BoundReport r = bounds(fim_location(loc, s.bs, fim_eta, cfg.light_speed));
    add_channel_crbs(r, fim_eta);
    return r;
}

Eigen::Matrix3d efim_position_rotation(const LocationParams &loc, const Vec2 &bs, const ArrayOfdmConfig &cfg,
                                       const PilotBlock &pilots, double noise_psd)
{
    if (loc.path_count() == 0)
        throw Error(ErrorCode::InvalidArgument, "at least one path is required");
    const ChannelParamSet cp = channel_params_from_location(loc, bs, cfg.light_speed);
    const Eigen::MatrixXd J = fim_channel_params(cp, cfg, pilots, noise_psd).entries;
    const Eigen::MatrixXd T = transformation_matrix(loc, bs, cfg.light_speed);

    Eigen::Matrix3d Je = Eigen::Matrix3d::Zero();
    Eigen::Index col = 0;
    // Rows of T: pose [0, 3), LOS gains [3, 5) when present, then 4 rows per scatterer.
    Eigen::Index row = 3;
    if (!loc.olos)
    {
        const Eigen::MatrixXd psi = J.block(0, 0, 5, 5);
        const Eigen::Matrix3d lambda =
            psi.topLeftCorner(3, 3) -
            psi.topRightCorner(3, 2) * psi.bottomRightCorner(2, 2).ldlt().solve(psi.bottomLeftCorner(2, 3));
        const Eigen::Matrix3d t00 = T.block(0, 0, 3, 3);
        Je += t00 * lambda * t00.transpose();
        row += 2;
        col += 5;
    }
    for (std::size_t k = 0; k < loc.scatterers.size(); ++k)
    {
        const Eigen::MatrixXd psi = J.block(col, col, 5, 5);
        // T_{k,0}: rows [p, alpha] (the LOS gain rows are zero for k > 0); T_{k,k}: rows [s_k, h_k].
        const Eigen::MatrixXd tk0 = T.block(0, col, 3, 5);
        const Eigen::MatrixXd tkk = T.block(row, col, 4, 5);
        const Eigen::MatrixXd inner = tkk * psi * tkk.transpose();
        const Eigen::MatrixXd cross = tk0 * psi * tkk.transpose();
        Je += tk0 * psi * tk0.transpose() - cross * inner.ldlt().solve(cross.transpose());
        row += 4;
        col += 5;
    }
    return 0.5 * (Je + Je.transpose());
}

Eigen::Matrix3d efim_position_rotation(const Scenario &s, const std::vector<cdouble> &gains,
                                       const ArrayOfdmConfig &cfg, const PilotBlock &pilots, double noise_psd)
{
    return efim_position_rotation(location_from_scenario(s, gains, cfg.light_speed), s.bs, cfg, pilots, noise_psd);
}

} // namespace mmwloc
