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

#include "mmwloc/sage.hpp"

#include <boost/math/tools/minima.hpp>
#include <string>

namespace mmwloc
{

namespace
{

cdouble inner(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) { return (a.conjugate().cwiseProduct(b)).sum(); }

// b_n = a_tx(aod, n)^H F_n as a row of length G.
Eigen::RowVectorXcd tx_projection(const SensingSet &s, double aod, int n)
{
    return steering_vector(ArraySide::Tx, s.cfg, aod, n).adjoint() * s.pilots[n];
}

// Per-path fit against the hidden data z with the gain profiled out. Objectives return
// -|r^H z|^2 / ||r||^2, so lower is better.
class PathFit
{
  public:
    PathFit(const SensingSet &s, const std::vector<Eigen::MatrixXcd> &z) : s_(s), z_(z) {}

    double aod_objective(double aod, double aoa, double tau) const
    {
        cdouble num{0.0, 0.0};
        double den = 0.0;
        for (int n = 0; n < s_.n_subcarriers(); ++n)
        {
            const Eigen::RowVectorXcd b = tx_projection(s_, aod, n);
            const Eigen::RowVectorXcd q = steering_vector(ArraySide::Rx, s_.cfg, aoa, n).adjoint() * z_[n];
            num += std::polar(1.0, s_.cfg.delay_phase_rate(n) * tau) * (q * b.adjoint())(0);
            den += b.squaredNorm();
        }
        return den > 0.0 ? -std::norm(num) / den : 0.0;
    }

    // Caches v_n = Z_n b_n^H e^{j w_n tau} for AOA searches.
    void prepare_aoa(double aod, double tau)
    {
        v_.resize(s_.n_subcarriers());
        den_ = 0.0;
        for (int n = 0; n < s_.n_subcarriers(); ++n)
        {
            const Eigen::RowVectorXcd b = tx_projection(s_, aod, n);
            v_[n] = std::polar(1.0, s_.cfg.delay_phase_rate(n) * tau) * (z_[n] * b.adjoint());
            den_ += b.squaredNorm();
        }
    }

    double aoa_objective(double aoa) const
    {
        cdouble num{0.0, 0.0};
        for (int n = 0; n < s_.n_subcarriers(); ++n)
            num += steering_vector(ArraySide::Rx, s_.cfg, aoa, n).dot(v_[n]);
        return den_ > 0.0 ? -std::norm(num) / den_ : 0.0;
    }

    // Caches c_n = a_rx^H Z_n b_n^H for delay searches.
    void prepare_delay(double aod, double aoa)
    {
        c_.resize(s_.n_subcarriers());
        den_ = 0.0;
        for (int n = 0; n < s_.n_subcarriers(); ++n)
        {
            const Eigen::RowVectorXcd b = tx_projection(s_, aod, n);
            c_[n] = steering_vector(ArraySide::Rx, s_.cfg, aoa, n).dot(z_[n] * b.adjoint());
            den_ += b.squaredNorm();
        }
    }

    double delay_objective(double tau) const
    {
        cdouble num{0.0, 0.0};
        for (int n = 0; n < s_.n_subcarriers(); ++n)
            num += std::polar(1.0, s_.cfg.delay_phase_rate(n) * tau) * c_[n];
        return den_ > 0.0 ? -std::norm(num) / den_ : 0.0;
    }

  private:
    const SensingSet &s_;
    const std::vector<Eigen::MatrixXcd> &z_;
    std::vector<Eigen::VectorXcd> v_;
    std::vector<cdouble> c_;
    double den_ = 0.0;
};

// Brent search of f(centre + width * x) over x in [-1, 1]; returns the new centre, or the old one
// when no strict improvement is found.
template <class F>
double line_search(F &&f, double centre, double width, double lo, double hi, const RefineConfig &rcfg)
{
    const double x_lo = std::max(-1.0, (lo - centre) / width);
    const double x_hi = std::min(1.0, (hi - centre) / width);
    if (!(x_hi > x_lo))
        return centre;
    const double current = f(centre);
    std::uintmax_t evals = rcfg.line_search_max_evals;
    auto g = [&](double x) { return f(centre + width * x); };
    const auto [x, value] = boost::math::tools::brent_find_minima(g, x_lo, x_hi, rcfg.line_search_bits, evals);
    return value < current ? centre + width * x : centre;
}

void check_finite(const PathParams &p, std::size_t k)
{
    if (!std::isfinite(p.delay) || !std::isfinite(p.aod) || !std::isfinite(p.aoa) || !std::isfinite(p.gain.real()) ||
        !std::isfinite(p.gain.imag()))
        throw Error(ErrorCode::NonFinite, "non-finite update for path " + std::to_string(k));
}

double total_energy(const std::vector<Eigen::MatrixXcd> &r)
{
    double e = 0.0;
    for (const auto &m : r)
        e += m.squaredNorm();
    return e;
}

} // namespace

double angle_bin_width(int n_antennas, const ArrayOfdmConfig &cfg)
{
    return cfg.carrier_wavelength() / cfg.element_spacing() / n_antennas;
}

std::vector<Eigen::MatrixXcd> path_response(const PathParams &params, const SensingSet &sensing)
{
    std::vector<Eigen::MatrixXcd> out(sensing.n_subcarriers());
    for (int n = 0; n < sensing.n_subcarriers(); ++n)
    {
        const cdouble scale = params.gain * std::polar(1.0, -sensing.cfg.delay_phase_rate(n) * params.delay);
        out[n] = (scale * steering_vector(ArraySide::Rx, sensing.cfg, params.aoa, n)) *
                 tx_projection(sensing, params.aod, n);
    }
    return out;
}

cdouble gain_update(const std::vector<Eigen::MatrixXcd> &residual, const std::vector<Eigen::MatrixXcd> &response)
{
    if (residual.size() != response.size())
        throw Error(ErrorCode::DimensionMismatch, "residual and response differ in subcarrier count");
    cdouble num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t n = 0; n < response.size(); ++n)
    {
        num += inner(response[n], residual[n]);
        den += response[n].squaredNorm();
    }
    if (!(den > 0.0))
        throw Error(ErrorCode::ZeroResponse, "path response is zero");
    return num / den;
}

std::vector<Eigen::MatrixXcd> model_residual(const std::vector<PathParams> &paths, const SensingSet &sensing)
{
    std::vector<Eigen::MatrixXcd> r = sensing.y;
    for (const auto &p : paths)
    {
        const auto mu = path_response(p, sensing);
        for (std::size_t n = 0; n < r.size(); ++n)
            r[n] -= mu[n];
    }
    return r;
}

double residual_energy(const std::vector<PathParams> &paths, const SensingSet &sensing)
{
    return total_energy(model_residual(paths, sensing));
}

RefinedEstimate sage_refine(const std::vector<PathParams> &initial, const SensingSet &sensing,
                            const RefineConfig &rcfg)
{
    if (initial.empty())
        throw Error(ErrorCode::InvalidArgument, "at least one path is required");
    const ArrayOfdmConfig &cfg = sensing.cfg;
    const int N = sensing.n_subcarriers();
    const double tx_width = rcfg.angle_bracket_bins * angle_bin_width(cfg.n_tx, cfg);
    const double rx_width = rcfg.angle_bracket_bins * angle_bin_width(cfg.n_rx, cfg);
    const double delay_width = rcfg.delay_bracket_steps * cfg.sample_period() / 10.0;
    const double delay_span = N * cfg.sample_period();

    RefinedEstimate out;
    out.paths = initial;
    std::vector<Eigen::MatrixXcd> residual = model_residual(out.paths, sensing);
    double energy = total_energy(residual);
    const double floor = 1e-28 * std::max(sensing.energy(), 1e-300);
    out.residual_energy.push_back(energy);
    if (rcfg.record_trajectory)
        out.trajectory.push_back(out.paths);

    for (int it = 0; it < rcfg.max_outer_iters && energy > floor; ++it)
    {
        for (std::size_t k = 0; k < out.paths.size(); ++k)
        {
            PathParams &p = out.paths[k];
            // Hidden data: residual with this path's own contribution restored.
            std::vector<Eigen::MatrixXcd> z = residual;
            const auto mu_old = path_response(p, sensing);
            for (int n = 0; n < N; ++n)
                z[n] += mu_old[n];

            PathFit fit(sensing, z);
            double u = std::sin(p.aod);
            u = line_search([&](double x) { return fit.aod_objective(std::asin(x), p.aoa, p.delay); }, u, tx_width,
                            -1.0, 1.0, rcfg);
            p.aod = std::asin(u);

            fit.prepare_aoa(p.aod, p.delay);
            double v = std::sin(p.aoa);
            v = line_search([&](double x) { return fit.aoa_objective(std::asin(x)); }, v, rx_width, -1.0, 1.0, rcfg);
            p.aoa = std::asin(v);

            fit.prepare_delay(p.aod, p.aoa);
            p.delay = line_search([&](double t) { return fit.delay_objective(t); }, p.delay, delay_width,
                                  -delay_span, 2.0 * delay_span, rcfg);
            p.delay = std::fmod(p.delay, delay_span);
            if (p.delay < 0.0)
                p.delay += delay_span;

            PathParams unit = p;
            unit.gain = 1.0;
            const auto r_unit = path_response(unit, sensing);
            p.gain = gain_update(z, r_unit);
            check_finite(p, k);
            for (int n = 0; n < N; ++n)
                residual[n] = z[n] - p.gain * r_unit[n];
        }
        const double next = total_energy(residual);
        out.iterations = it + 1;
        out.residual_energy.push_back(next);
        if (rcfg.record_trajectory)
            out.trajectory.push_back(out.paths);
        const double improvement = energy - next;
        energy = next;
        if (improvement <= rcfg.tolerance * energy)
            break;
    }
    return out;
}

RefinedEstimate sage_refine(const CoarseEstimate &coarse, const SensingSet &sensing, const RefineConfig &rcfg)
{
    std::vector<PathParams> init;
    init.reserve(coarse.paths.size());
    for (const auto &c : coarse.paths)
        init.push_back({c.delay, c.aod, c.aoa, c.gain});
    return sage_refine(init, sensing, rcfg);
}

} // namespace mmwloc
