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

#include "mmwloc/campaign.hpp"
#include "oracle.hpp"

using namespace mmwloc;
using std::numbers::pi;

namespace
{

struct Run
{
    Scenario scene;
    ChannelParamSet truth;
    PipelineResult result;
};

Run noiseless(std::vector<Vec2> scatterers, Condition condition, const EstimatorConfig &ec, Vec2 ms = {4.0, 0.0},
              double rotation = 0.1)
{
    const ArrayOfdmConfig cfg;
    Run r;
    r.scene.ms = ms;
    r.scene.rotation = rotation;
    r.scene.scatterers = std::move(scatterers);
    r.scene.los_blocked = condition == Condition::Olos;
    const PilotBlock pilots = random_pilots(cfg, 12);
    r.truth = params_from_scenario(r.scene, draw_gains(r.scene, cfg, {}, 13));
    const ObservationSet obs = synthesize(r.truth, cfg, pilots, 0.0, 1);
    r.result = run_pipeline(obs, pilots, cfg, r.scene.bs, condition, ec);
    return r;
}

} // namespace

TEST_CASE("AOA unfolding maps the arcsin branch to the array rear")
{
    CHECK(unfold_aoa(0.1) == doctest::Approx(pi - 0.1));
    CHECK(std::sin(unfold_aoa(0.37)) == doctest::Approx(std::sin(0.37)));
}

TEST_CASE("noiseless LOS and NLOS pipelines recover the pose")
{
    const EstimatorConfig ec;
    const Run los = noiseless({}, Condition::Los, ec, {3.1, 0.23}, 0.07);
    CHECK((los.result.location.solution.pose.position - los.scene.ms).norm() < 1e-5);
    CHECK(std::abs(wrap_pi(los.result.location.solution.pose.rotation - los.scene.rotation)) < 1e-5);

    const Run nlos = noiseless({{1.5, 0.4}}, Condition::Nlos, ec);
    REQUIRE(nlos.result.channel.params.size() == 2);
    CHECK((nlos.result.location.solution.pose.position - nlos.scene.ms).norm() < 1e-5);
    CHECK(std::abs(wrap_pi(nlos.result.location.solution.pose.rotation - nlos.scene.rotation)) < 1e-5);
    for (std::size_t k = 0; k < 2; ++k)
    {
        CHECK(nlos.result.channel.params.paths[k].delay ==
              doctest::Approx(nlos.truth.paths[k].delay).epsilon(1e-8));
        CHECK(nlos.result.channel.params.paths[k].aoa == doctest::Approx(nlos.truth.paths[k].aoa).epsilon(1e-8));
    }
}

TEST_CASE("grid mode follows SOMP, per-path delay and SAGE")
{
    EstimatorConfig ec;
    ec.mode = DetectionMode::Grid;
    const Run r = noiseless({}, Condition::Los, ec);
    // Noiseless input leaves only the energy floor as a stopping rule, so off-grid leakage is picked up as
    // extra atoms. The pose is then limited to roughly one angle bin at this range.
    CHECK(r.result.channel.coarse.paths.size() > 1);
    CHECK(r.result.channel.refined.paths.size() == r.result.channel.coarse.paths.size());
    const double bin_at_range = 2.0 / 16.0 * r.scene.ms.norm();
    CHECK((r.result.location.solution.pose.position - r.scene.ms).norm() < bin_at_range);

    ec.refine = false;
    const Run coarse = noiseless({}, Condition::Los, ec);
    // Coarse-only: angles within one grid bin.
    const double bin = 2.0 / 16.0;
    CHECK(std::abs(std::sin(coarse.result.channel.params.paths[0].aoa) - std::sin(coarse.truth.paths[0].aoa)) <
          bin);
}

TEST_CASE("LOS selection rules")
{
    EstimatorConfig strongest, shortest;
    shortest.los_rule = LosRule::ShortestDelay;
    const Run a = noiseless({{1.5, 0.4}}, Condition::Nlos, strongest);
    const Run b = noiseless({{1.5, 0.4}}, Condition::Nlos, shortest);
    // Noiseless: both rules agree on the true LOS.
    CHECK(a.result.channel.params.paths[0].delay == doctest::Approx(b.result.channel.params.paths[0].delay));
    CHECK(std::abs(a.result.channel.params.paths[0].gain) > std::abs(a.result.channel.params.paths[1].gain));
}

TEST_CASE("OLOS pipeline on noiseless observations")
{
    EstimatorConfig ec;
    ec.search = {0.01, 0.5};
    const Run r = noiseless({{1.5, 0.4}, {1.5, 0.9}, {1.5, 1.4}}, Condition::Olos, ec);
    CHECK(r.result.channel.params.size() == 3);
    CHECK((r.result.location.solution.pose.position - r.scene.ms).norm() < 1e-4);
}

TEST_CASE("localization needs paths")
{
    const ArrayOfdmConfig cfg;
    ChannelParamSet empty;
    CHECK_THROWS_AS(localize(empty, Condition::Los, {0, 0}, cfg, random_pilots(cfg, 1), 1.0, {}), Error);
    CHECK(condition_from_string("olos") == Condition::Olos);
    CHECK_THROWS_AS(condition_from_string("indoor"), Error);
}
