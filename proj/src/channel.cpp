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

#include "mmwloc/channel.hpp"

#include <random>

namespace mmwloc
{

using std::numbers::pi;

double ArrayOfdmConfig::wavelength(int subcarrier) const
{
    if (narrowband)
        return carrier_wavelength();
    return light_speed / (subcarrier / (n_subcarriers * sample_period()) + carrier_hz);
}

double ArrayOfdmConfig::delay_phase_rate(int subcarrier) const
{
    return 2.0 * pi * subcarrier / (n_subcarriers * sample_period());
}

void ArrayOfdmConfig::validate() const
{
    if (n_tx < 1 || n_rx < 1)
        throw Error(ErrorCode::InvalidConfig, "antenna counts must be positive");
    if (n_subcarriers < 1)
        throw Error(ErrorCode::InvalidConfig, "at least one subcarrier is required");
    if (n_beams_per_tx < 1 || n_transmissions < 1)
        throw Error(ErrorCode::InvalidConfig, "beam and transmission counts must be positive");
    if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0) || bandwidth_hz > carrier_hz)
        throw Error(ErrorCode::InvalidConfig, "require 0 < bandwidth <= carrier");
    if (!(light_speed > 0.0) || spacing < 0.0)
        throw Error(ErrorCode::InvalidConfig, "invalid light speed or element spacing");
}

namespace
{

int side_count(ArraySide side, const ArrayOfdmConfig &cfg) { return side == ArraySide::Tx ? cfg.n_tx : cfg.n_rx; }

void check_subcarrier(const ArrayOfdmConfig &cfg, int n)
{
    if (n < 0 || n >= cfg.n_subcarriers)
        throw Error(ErrorCode::InvalidArgument, "subcarrier index out of range");
}

} // namespace

Eigen::VectorXcd steering_vector(ArraySide side, const ArrayOfdmConfig &cfg, double angle, int subcarrier)
{
    check_subcarrier(cfg, subcarrier);
    const int count = side_count(side, cfg);
    const double kappa = 2.0 * pi * cfg.element_spacing() / cfg.wavelength(subcarrier) * std::sin(angle);
    const double centre = 0.5 * (count - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(count));
    Eigen::VectorXcd a(count);
    for (int i = 0; i < count; ++i)
        a(i) = std::polar(scale, (i - centre) * kappa);
    return a;
}

Eigen::VectorXcd steering_derivative(ArraySide side, const ArrayOfdmConfig &cfg, double angle, int subcarrier)
{
    Eigen::VectorXcd a = steering_vector(side, cfg, angle, subcarrier);
    const int count = side_count(side, cfg);
    const double rate = 2.0 * pi * cfg.element_spacing() / cfg.wavelength(subcarrier) * std::cos(angle);
    const double centre = 0.5 * (count - 1);
    for (int i = 0; i < count; ++i)
        a(i) *= cdouble(0.0, (i - centre) * rate);
    return a;
}

Eigen::MatrixXcd channel_matrix(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, int subcarrier)
{
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(cfg.n_rx, cfg.n_tx);
    const double w = cfg.delay_phase_rate(subcarrier);
    for (const auto &path : cp.paths)
    {
        const cdouble gamma = path.gain * std::polar(1.0, -w * path.delay);
        H.noalias() += gamma * steering_vector(ArraySide::Rx, cfg, path.aoa, subcarrier) *
                       steering_vector(ArraySide::Tx, cfg, path.aod, subcarrier).adjoint();
    }
    return H;
}

PilotBlock PilotBlock::truncated(int g_count) const
{
    if (g_count < 1 || g_count > n_transmissions)
        throw Error(ErrorCode::InvalidArgument, "truncation outside the available transmissions");
    PilotBlock out;
    out.n_transmissions = g_count;
    out.n_subcarriers = n_subcarriers;
    const auto count = static_cast<std::ptrdiff_t>(g_count) * n_subcarriers;
    out.beamformers.assign(beamformers.begin(), beamformers.begin() + count);
    out.symbols.assign(symbols.begin(), symbols.begin() + count);
    return out;
}

PilotBlock PilotBlock::scaled(double factor) const
{
    PilotBlock out = *this;
    for (auto &x : out.symbols)
        x *= factor;
    return out;
}

PilotBlock random_pilots(const ArrayOfdmConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);

    PilotBlock block;
    block.n_transmissions = cfg.n_transmissions;
    block.n_subcarriers = cfg.n_subcarriers;
    const std::size_t count = static_cast<std::size_t>(cfg.n_transmissions) * cfg.n_subcarriers;
    block.beamformers.reserve(count);
    block.symbols.reserve(count);
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.n_tx) * cfg.n_beams_per_tx);
    for (int g = 0; g < cfg.n_transmissions; ++g)
    {
        // Analog phase shifters are frequency-flat: one beamformer per transmission.
        Eigen::MatrixXcd F(cfg.n_tx, cfg.n_beams_per_tx);
        for (Eigen::Index c = 0; c < F.cols(); ++c)
            for (Eigen::Index r = 0; r < F.rows(); ++r)
                F(r, c) = std::polar(norm, phase(rng));
        for (int n = 0; n < cfg.n_subcarriers; ++n)
        {
            Eigen::VectorXcd x(cfg.n_beams_per_tx);
            for (Eigen::Index m = 0; m < x.size(); ++m)
                x(m) = std::polar(1.0, phase(rng));
            block.beamformers.push_back(F);
            block.symbols.push_back(std::move(x));
        }
    }
    return block;
}

std::vector<Eigen::VectorXcd> noiseless_signal(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg,
                                               const PilotBlock &pilots)
{
    if (pilots.n_subcarriers != cfg.n_subcarriers)
        throw Error(ErrorCode::DimensionMismatch, "pilot block does not match the subcarrier count");
    std::vector<Eigen::VectorXcd> mu(pilots.beamformers.size());
    for (int n = 0; n < cfg.n_subcarriers; ++n)
    {
        const Eigen::MatrixXcd H = channel_matrix(cp, cfg, n);
        for (int g = 0; g < pilots.n_transmissions; ++g)
            mu[pilots.index(g, n)] = H * pilots.effective(g, n);
    }
    return mu;
}

ObservationSet synthesize(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                          double noise_psd, std::uint64_t seed)
{
    if (!(noise_psd >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "noise PSD must be non-negative");
    for (const auto &path : cp.paths)
    {
        if (path.delay < 0.0)
            throw Error(ErrorCode::InvalidArgument, "negative path delay");
        if (path.delay >= cfg.cp_duration())
            throw Error(ErrorCode::DelayExceedsCp, "path delay exceeds the cyclic prefix duration");
    }

    ObservationSet obs;
    obs.n_transmissions = pilots.n_transmissions;
    obs.n_subcarriers = pilots.n_subcarriers;
    obs.noise_psd = noise_psd;
    obs.y = noiseless_signal(cp, cfg, pilots);
    if (noise_psd > 0.0)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * noise_psd));
        for (auto &y : obs.y)
            for (Eigen::Index i = 0; i < y.size(); ++i)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                y(i) += cdouble(re, im);
            }
    }
    return obs;
}

double noise_psd_for_snr(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                         double target_snr_db)
{
    double energy = 0.0;
    for (const auto &mu : noiseless_signal(cp, cfg, pilots))
        energy += mu.squaredNorm();
    if (!(energy > 0.0))
        throw Error(ErrorCode::ZeroSignal, "signal energy is zero");
    const double samples = static_cast<double>(pilots.n_transmissions) * pilots.n_subcarriers * cfg.n_rx;
    return energy / (samples * std::pow(10.0, target_snr_db / 10.0));
}

double atmospheric_factor(double distance)
{
    constexpr double kDbPerMeter = 16.0 / 1000.0;
    return std::pow(10.0, -kDbPerMeter * distance / 10.0);
}

double path_loss_los(double d0, const ArrayOfdmConfig &cfg)
{
    const double fs = cfg.carrier_wavelength() / (4.0 * pi * d0);
    return 1.0 / (atmospheric_factor(d0) * fs * fs);
}

double path_loss_nlos(double d1, double d2, double reflection_loss, const ArrayOfdmConfig &cfg)
{
    const double d = d1 + d2;
    const double x = kScattererDensity * d2;
    const double geometry = x * x * std::exp(-x);
    const double fs = cfg.carrier_wavelength() / (4.0 * pi * d);
    return 1.0 / (reflection_loss * geometry * atmospheric_factor(d) * fs * fs);
}

double path_loss(std::size_t k, const Scenario &s, const ArrayOfdmConfig &cfg, double reflection_loss)
{
    if (!s.los_blocked && k == 0)
        return path_loss_los((s.ms - s.bs).norm(), cfg);
    const std::size_t idx = s.los_blocked ? k : k - 1;
    if (idx >= s.scatterers.size())
        throw Error(ErrorCode::InvalidArgument, "path index out of range");
    const Vec2 &sc = s.scatterers[idx];
    return path_loss_nlos((sc - s.bs).norm(), (s.ms - sc).norm(), reflection_loss, cfg);
}

std::vector<cdouble> draw_gains(const Scenario &s, const ArrayOfdmConfig &cfg, const GainModel &model,
                                std::uint64_t seed)
{
    s.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double array_gain = static_cast<double>(cfg.n_tx) * cfg.n_rx;

    std::vector<cdouble> gains;
    gains.reserve(s.path_count());
    for (std::size_t k = 0; k < s.path_count(); ++k)
    {
        cdouble h;
        if (model.law == FadingLaw::UnitModulus)
            h = std::polar(1.0, phase(rng));
        else
        {
            const double re = normal(rng);
            const double im = normal(rng);
            h = cdouble(re, im) / std::sqrt(2.0);
        }
        const bool los = !s.los_blocked && k == 0;
        double reflection = 1.0;
        if (!los)
        {
            const double db = model.reflection_loss_mean_db + model.reflection_loss_std_db * normal(rng);
            reflection = std::pow(10.0, db / 10.0);
        }
        gains.push_back(std::sqrt(array_gain / path_loss(k, s, cfg, reflection)) * h);
    }
    return gains;
}

} // namespace mmwloc
