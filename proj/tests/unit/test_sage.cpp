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

#include "mmwloc/sage.hpp"
#include "properties.hpp"

using namespace mmwloc;

TEST_CASE("SAGE refines an off-grid path from its grid atom")
{
    ArrayOfdmConfig cfg;
    const PilotBlock pilots = random_pilots(cfg, 5);
    ChannelParamSet cp;
    cp.paths.push_back({21.3e-9, 0.217, 0.341, cdouble(0.3, 0.9)});
    const SensingSet s = build_sensing(synthesize(cp, cfg, pilots, 0.0, 1), pilots, cfg);
    CoarseEstimate coarse = dcs_somp(s, {1e-8 * s.energy(), 1e-3}, 1);
    per_path_delay_gain(coarse, s);
    const RefinedEstimate r = sage_refine(coarse, s);
    REQUIRE(r.paths.size() == 1);
    CHECK(r.paths[0].delay == doctest::Approx(21.3e-9).epsilon(1e-7));
    CHECK(r.paths[0].aod == doctest::Approx(0.217).epsilon(1e-7));
    CHECK(r.paths[0].aoa == doctest::Approx(0.341).epsilon(1e-7));
    CHECK(std::abs(r.paths[0].gain - cp.paths[0].gain) < 1e-6);
    CHECK(r.residual_energy.back() < 1e-12 * s.energy());
    CHECK(r.trajectory.size() == r.residual_energy.size());
    CHECK(r.trajectory.front()[0].aod == doctest::Approx(coarse.paths[0].aod));
}

TEST_CASE("gain update is the least-squares coefficient")
{
    std::vector<Eigen::MatrixXcd> response{Eigen::MatrixXcd::Constant(2, 2, cdouble(1.0, 1.0))};
    std::vector<Eigen::MatrixXcd> residual{response[0] * cdouble(0.5, -2.0)};
    CHECK(std::abs(gain_update(residual, response) - cdouble(0.5, -2.0)) < 1e-14);
    std::vector<Eigen::MatrixXcd> zero{Eigen::MatrixXcd::Zero(2, 2)};
    CHECK_THROWS_AS(gain_update(residual, zero), Error);
}

TEST_CASE("model residual of the true paths is the noise")
{
    ArrayOfdmConfig cfg;
    cfg.n_tx = cfg.n_rx = 8;
    const PilotBlock pilots = random_pilots(cfg, 5);
    ChannelParamSet cp;
    cp.paths.push_back({11e-9, -0.3, 0.6, cdouble(1.0, 0.0)});
    const SensingSet clean = build_sensing(synthesize(cp, cfg, pilots, 0.0, 1), pilots, cfg);
    CHECK(residual_energy(cp.paths, clean) < 1e-24 * clean.energy());
    CHECK(residual_energy({}, clean) == doctest::Approx(clean.energy()));
}

TEST_CASE("SAGE likelihood is monotone on random inputs")
{
    const properties::Report r = properties::sage_likelihood_monotone(30, 2);
    CHECK_MESSAGE(r.failures == 0, r.first_failure);
}
