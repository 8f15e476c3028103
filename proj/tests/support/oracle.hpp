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

// Reference computations written independently of the library, used as test oracles.

#ifndef MMWLOC_TESTS_ORACLE_HPP
#define MMWLOC_TESTS_ORACLE_HPP

#include <random>

#include "mmwloc/channel.hpp"

namespace oracle
{

using mmwloc::cdouble;

// y(g, n) = sum_k h_k e^{-j 2 pi n tau_k / (N T_s)} a_r(aoa_k) a_t(aod_k)^H F x, with plain loops.
std::vector<std::vector<cdouble>> signal(const mmwloc::ChannelParamSet &cp, const mmwloc::ArrayOfdmConfig &cfg,
                                         const mmwloc::PilotBlock &pilots);

// Channel FIM from central differences of `signal` (step h per parameter, relative to its scale).
Eigen::MatrixXd fim_finite_difference(const mmwloc::ChannelParamSet &cp, const mmwloc::ArrayOfdmConfig &cfg,
                                      const mmwloc::PilotBlock &pilots, double noise_psd);

// Channel vector of a scene from first principles, per path [tau, aod, aoa, Re h, Im h].
Eigen::VectorXd channel_of_location(const Eigen::VectorXd &loc, bool olos, const mmwloc::Vec2 &bs, double c);

// d channel / d location by central differences (angle differences wrapped).
Eigen::MatrixXd jacobian_finite_difference(const Eigen::VectorXd &loc, bool olos, const mmwloc::Vec2 &bs,
                                           double c, double step);

// Regularized lower incomplete gamma P(a, x) by its power series (integer or real a > 0).
double gamma_p(double a, double x);

// Random scene helpers.
mmwloc::Scenario random_scenario(std::mt19937_64 &rng, int n_scatterers, bool los_blocked);
std::vector<cdouble> random_gains(std::mt19937_64 &rng, std::size_t count, double scale = 1.0);

} // namespace oracle

#endif
