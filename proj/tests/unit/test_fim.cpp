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

#include <doctest.h>

#include "mmwloc/fim.hpp"
#include "oracle.hpp"

using namespace mmwloc;

namespace
{

ArrayOfdmConfig tiny_config()
{
    ArrayOfdmConfig cfg;
    cfg.n_tx = 4;
    cfg.n_rx = 4;
    cfg.n_subcarriers = 4;
    cfg.n_transmissions = 2;
    return cfg;
}

Scenario reference_scene(bool with_scatterer)
{
    Scenario s;
    s.ms = {4.0, 0.0};
    s.rotation = 0.1;
    if (with_scatterer)
        s.scatterers = {{1.5, 0.4}};
    return s;
}

double max_relative_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
    double worst = 0.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / std::sqrt(std::abs(b(r, r) * b(c, c))));
    return worst;
}

} // namespace

TEST_CASE("channel FIM matches the finite-difference oracle")
{
    std::mt19937_64 rng(21);
    const ArrayOfdmConfig cfg = tiny_config();
    for (int i = 0; i < 10; ++i)
    {
        const Scenario s = oracle::random_scenario(rng, i % 2, false);
        const ChannelParamSet cp = params_from_scenario(s, oracle::random_gains(rng, s.path_count()));
        const PilotBlock pilots = random_pilots(cfg, rng());
        const FimMatrix j = fim_channel_params(cp, cfg, pilots, 0.01);
        CHECK(max_relative_error(j.entries, oracle::fim_finite_difference(cp, cfg, pilots, 0.01)) < 1e-4);
    }
}

TEST_CASE("zero-based derivative origin disagrees with the oracle")
{
    // kept for comparison only; the steering vectors are centered
    std::mt19937_64 rng(3);
    const ArrayOfdmConfig cfg = tiny_config();
    const Scenario s = oracle::random_scenario(rng, 1, false);
    const ChannelParamSet cp = params_from_scenario(s, oracle::random_gains(rng, s.path_count()));
    const PilotBlock pilots = random_pilots(cfg, 9);
    const Eigen::MatrixXd fd = oracle::fim_finite_difference(cp, cfg, pilots, 0.01);
    const FimMatrix zero_based = fim_channel_params(cp, cfg, pilots, 0.01, DerivativeOrigin::ZeroBased);
    CHECK(max_relative_error(zero_based.entries, fd) > 1e-2);
}

TEST_CASE("bounds scale with the noise level")
{
    const ArrayOfdmConfig cfg;
    const Scenario s = reference_scene(true);
    const std::vector<cdouble> gains{cdouble(1, 0), cdouble(0.2, 0.1)};
    const PilotBlock pilots = random_pilots(cfg, 1);
    const BoundReport a = scenario_bounds(s, gains, cfg, pilots, 1.0);
    const BoundReport b = scenario_bounds(s, gains, cfg, pilots, std::pow(10.0, -0.6));
    CHECK(b.peb / a.peb == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-9));
    CHECK(b.reb / a.reb == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-9));
    CHECK(b.crb_delay[0] / a.crb_delay[0] == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-9));
}

TEST_CASE("OLOS needs three scatterers")
{
    const ArrayOfdmConfig cfg;
    const PilotBlock pilots = random_pilots(cfg, 1);
    Scenario s = reference_scene(false);
    s.los_blocked = true;
    s.scatterers = {{1.5, 0.4}, {1.5, 0.9}};
    try
    {
        scenario_bounds(s, {1.0, 1.0}, cfg, pilots, 1e-3);
        FAIL("expected SingularFim");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::SingularFim);
    }
    s.scatterers.push_back({1.5, 1.4});
    CHECK(scenario_bounds(s, {1.0, 1.0, 1.0}, cfg, pilots, 1e-3).peb > 0.0);
}

TEST_CASE("a scatterer does not worsen the position bound")
{
    ArrayOfdmConfig cfg;
    cfg.n_tx = cfg.n_rx = 32;
    const PilotBlock pilots = random_pilots(cfg, 4);
    // EFIM of position and rotation: the extra path only adds information
    const double los = position_error_bound(efim_position_rotation(reference_scene(false), {1.0}, cfg, pilots, 1e-2));
    const double nlos = position_error_bound(
        efim_position_rotation(reference_scene(true), {1.0, cdouble(0.3, 0.2)}, cfg, pilots, 1e-2));
    CHECK(nlos <= los * (1.0 + 1e-9));
}

TEST_CASE("approximate EFIM is close to the exact bound for large arrays")
{
    ArrayOfdmConfig cfg;
    cfg.n_tx = cfg.n_rx = 65;
    cfg.n_subcarriers = 20;
    cfg.n_transmissions = 32;
    const PilotBlock pilots = random_pilots(cfg, 2);
    const Scenario s = reference_scene(true);
    const std::vector<cdouble> gains = draw_gains(s, cfg, {}, 3);
    const BoundReport exact = scenario_bounds(s, gains, cfg, pilots, 1.0);
    const double approx = position_error_bound(efim_position_rotation(s, gains, cfg, pilots, 1.0));
    CHECK(std::abs(approx - exact.peb) / exact.peb < 0.05);
}

TEST_CASE("FIM input validation")
{
    const ArrayOfdmConfig cfg = tiny_config();
    const ChannelParamSet cp = params_from_scenario(reference_scene(false), {1.0});
    const PilotBlock pilots = random_pilots(cfg, 1);
    CHECK_THROWS_AS(fim_channel_params(cp, cfg, pilots, 0.0), Error);
    CHECK_THROWS_AS(fim_channel_params(cp, cfg, pilots.scaled(0.0), 1.0), Error);
    CHECK_THROWS_AS(invert_fim(Eigen::MatrixXd::Zero(3, 3)), Error);
    Eigen::Matrix2d m;
    m << 4, 1, 1, 3;
    CHECK((invert_fim(m).inverse * m - Eigen::Matrix2d::Identity()).norm() < 1e-12);
}

TEST_CASE("location FIM equals T J T^T")
{
    const ArrayOfdmConfig cfg = tiny_config();
    const Scenario s = reference_scene(true);
    const std::vector<cdouble> gains{1.0, cdouble(0.1, 0.2)};
    const FimMatrix je = fim_channel_params(params_from_scenario(s, gains), cfg, random_pilots(cfg, 1), 0.1);
    const Eigen::MatrixXd T = transformation_matrix(location_from_scenario(s, gains), s.bs);
    const FimMatrix jl = fim_location(s, je);
    CHECK((jl.entries - T * je.entries * T.transpose()).norm() < 1e-9 * jl.entries.norm());
}
