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

#ifndef MMWLOC_CHANNEL_HPP
#define MMWLOC_CHANNEL_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mmwloc/geometry.hpp"

namespace mmwloc
{

// Radio and OFDM constants shared by synthesis, bounds and estimation.
struct ArrayOfdmConfig
{
    int n_tx = 16;
    int n_rx = 16;
    double spacing = 0.0; // [m]; 0 selects half the carrier wavelength
    double carrier_hz = 60e9;
    double bandwidth_hz = 100e6;
    int n_subcarriers = 10;
    int n_beams_per_tx = 1;
    int n_transmissions = 16;
    int cp_len_symbols = 0; // 0 selects N/2
    double light_speed = kLightSpeed;
    bool narrowband = false; // force lambda_n = lambda_c

    double sample_period() const { return 1.0 / bandwidth_hz; }
    double carrier_wavelength() const { return light_speed / carrier_hz; }
    double element_spacing() const { return spacing > 0.0 ? spacing : 0.5 * carrier_wavelength(); }
    double wavelength(int subcarrier) const;
    int cp_length() const { return cp_len_symbols > 0 ? cp_len_symbols : std::max(1, n_subcarriers / 2); }
    double cp_duration() const { return cp_length() * sample_period(); }
    // Angular frequency of subcarrier n in the delay phase e^{-j w_n tau}.
    double delay_phase_rate(int subcarrier) const;

    // Throws InvalidConfig.
    void validate() const;
};

enum class ArraySide
{
    Tx,
    Rx
};

// Unit-norm ULA response with symmetric element indices -(N-1)/2 .. (N-1)/2.
Eigen::VectorXcd steering_vector(ArraySide side, const ArrayOfdmConfig &cfg, double angle, int subcarrier);

// Derivative of `steering_vector` with respect to the angle.
Eigen::VectorXcd steering_derivative(ArraySide side, const ArrayOfdmConfig &cfg, double angle, int subcarrier);

// H[n] = A_rx[n] Gamma[n] A_tx[n]^H.
Eigen::MatrixXcd channel_matrix(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, int subcarrier);

// Beamformers and symbols per (g, n), stored transmission-major: index g * N + n.
struct PilotBlock
{
    int n_transmissions = 0;
    int n_subcarriers = 0;
    std::vector<Eigen::MatrixXcd> beamformers; // N_t x M_t, unit Frobenius norm
    std::vector<Eigen::VectorXcd> symbols;     // M_t

    std::size_t index(int g, int n) const { return static_cast<std::size_t>(g) * n_subcarriers + n; }
    // F^(g)[n] x^(g)[n]
    Eigen::VectorXcd effective(int g, int n) const { return beamformers[index(g, n)] * symbols[index(g, n)]; }
    // The first `g_count` transmissions.
    PilotBlock truncated(int g_count) const;
    // Multiplies every symbol by `factor` (transmit power scaling).
    PilotBlock scaled(double factor) const;
};

// Random-phase analog beamformers (one per transmission, shared by all subcarriers) and random-phase
// symbols per (g, n). Draws are made in transmission-major order, so the first G transmissions do not depend
// on the configured total.
PilotBlock random_pilots(const ArrayOfdmConfig &cfg, std::uint64_t seed);

struct ObservationSet
{
    int n_transmissions = 0;
    int n_subcarriers = 0;
    std::vector<Eigen::VectorXcd> y; // N_r per (g, n), index g * N + n
    double noise_psd = 0.0;

    const Eigen::VectorXcd &at(int g, int n) const { return y[static_cast<std::size_t>(g) * n_subcarriers + n]; }
};

// Noise-free received signal H[n] F x per (g, n).
std::vector<Eigen::VectorXcd> noiseless_signal(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg,
                                               const PilotBlock &pilots);

// y = H F x + n with circular Gaussian noise of variance noise_psd per complex sample.
// Throws DelayExceedsCp when a path delay is not covered by the cyclic prefix.
ObservationSet synthesize(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                          double noise_psd, std::uint64_t seed);

// N_0 giving the requested ratio between the noiseless signal energy and G * N * N_r * N_0.
double noise_psd_for_snr(const ChannelParamSet &cp, const ArrayOfdmConfig &cfg, const PilotBlock &pilots,
                         double target_snr_db);

// Atmospheric attenuation xi^2(d) at 16 dB/km, as a linear power factor.
double atmospheric_factor(double distance);

// Path loss rho of the LOS path over d0 [m].
double path_loss_los(double d0, const ArrayOfdmConfig &cfg);

// Path loss of a single-bounce path. `reflection_loss` is sigma_0^2 in linear scale.
double path_loss_nlos(double d1, double d2, double reflection_loss, const ArrayOfdmConfig &cfg);

// Density of the environment geometry model [1/m].
inline constexpr double kScattererDensity = 1.0 / 7.0;

// Path loss of path k of a scenario, k = 0 being the LOS path; otherwise k indexes scatterers[k - 1]
// (OLOS scenarios index scatterers[k]).
double path_loss(std::size_t k, const Scenario &s, const ArrayOfdmConfig &cfg, double reflection_loss);

enum class FadingLaw
{
    UnitModulus,   // |h| = 1 with a uniform phase
    ComplexNormal, // h ~ CN(0, 1)
};

struct GainModel
{
    FadingLaw law = FadingLaw::UnitModulus;
    double reflection_loss_mean_db = -10.0;
    double reflection_loss_std_db = 4.0;
};

// Normalized gains sqrt(N_t N_r / rho_k) h_k in scenario order [LOS (if present), scatterers...].
std::vector<cdouble> draw_gains(const Scenario &s, const ArrayOfdmConfig &cfg, const GainModel &model,
                                std::uint64_t seed);

} // namespace mmwloc

#endif
