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

#include "mmwloc/geometry.hpp"
#include "oracle.hpp"

using namespace mmwloc;
using std::numbers::pi;

namespace
{

Scenario reference_scene()
{
    Scenario s;
    s.bs = {0.0, 0.0};
    s.ms = {4.0, 0.0};
    s.rotation = 0.1;
    s.scatterers = {{1.5, 0.4}};
    return s;
}

} // namespace

TEST_CASE("LOS path of the reference scene")
{
    const Scenario s = reference_scene();
    const ChannelParamSet cp = params_from_scenario(s, {cdouble(1, 0), cdouble(0.1, 0)});
    REQUIRE(cp.size() == 2);
    CHECK(cp.paths[0].delay == doctest::Approx(4.0 / kLightSpeed).epsilon(1e-14));
    CHECK(cp.paths[0].aod == doctest::Approx(0.0));
    CHECK(cp.paths[0].aoa == doctest::Approx(pi - 0.1).epsilon(1e-14));
}

TEST_CASE("reflected path of the reference scatterer")
{
    const ChannelParamSet cp = params_from_scenario(reference_scene(), {cdouble(1, 0), cdouble(0.1, 0)});
    const double d1 = std::hypot(1.5, 0.4), d2 = std::hypot(2.5, 0.4);
    CHECK(cp.paths[1].delay == doctest::Approx((d1 + d2) / kLightSpeed).epsilon(1e-14));
    CHECK(cp.paths[1].aod == doctest::Approx(std::atan2(0.4, 1.5)).epsilon(1e-14));
    // pi + angle(p - s) - alpha = pi - atan(0.4 / 2.5) - 0.1
    CHECK(cp.paths[1].aoa == doctest::Approx(pi - std::atan(0.4 / 2.5) - 0.1).epsilon(1e-14));
    CHECK(cp.paths[1].aoa == doctest::Approx(2.882937).epsilon(1e-6));
}

TEST_CASE("reflected paths are longer than the direct path")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i)
    {
        const Scenario s = oracle::random_scenario(rng, 3, false);
        const ChannelParamSet cp = params_from_scenario(s, oracle::random_gains(rng, 4));
        for (std::size_t k = 1; k < cp.size(); ++k)
            CHECK(cp.paths[k].delay > cp.paths[0].delay);
    }
}

TEST_CASE("scatterers are ordered by delay, ties by AOD")
{
    Scenario s = reference_scene();
    s.scatterers = {{1.5, 1.4}, {1.5, 0.4}, {1.5, 0.9}};
    const ChannelParamSet cp = params_from_scenario(s, {1.0, 2.0, 3.0, 4.0});
    CHECK(cp.paths[1].gain == cdouble(3.0));
    CHECK(cp.paths[2].gain == cdouble(4.0));
    CHECK(cp.paths[3].gain == cdouble(2.0));

    // Mirror images have equal delays; the lower AOD comes first.
    s.scatterers = {{1.5, 0.4}, {1.5, -0.4}};
    s.ms = {4.0, 0.0};
    const ChannelParamSet mirror = params_from_scenario(s, {1.0, 2.0, 3.0});
    CHECK(mirror.paths[1].aod < mirror.paths[2].aod);
    CHECK(mirror.paths[1].gain == cdouble(3.0));
}

TEST_CASE("scenario validation")
{
    Scenario s = reference_scene();
    s.ms = s.bs;
    CHECK_THROWS_AS(s.validate(), Error);
    s = reference_scene();
    s.scatterers.push_back(s.ms);
    try
    {
        s.validate();
        FAIL("expected an error");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::DegenerateGeometry);
    }
    s = reference_scene();
    s.scatterers.clear();
    s.los_blocked = true;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("angle wrapping")
{
    CHECK(wrap_two_pi(-0.1) == doctest::Approx(2 * pi - 0.1));
    CHECK(wrap_two_pi(2 * pi) == doctest::Approx(0.0));
    CHECK(wrap_pi(pi + 0.1) == doctest::Approx(-pi + 0.1));
    CHECK(wrap_pi(-pi) == doctest::Approx(pi));
}

TEST_CASE("location vector round trip")
{
    std::mt19937_64 rng(3);
    for (bool olos : {false, true})
    {
        const Scenario s = oracle::random_scenario(rng, 3, olos);
        const LocationParams loc = location_from_scenario(s, oracle::random_gains(rng, s.path_count()));
        const LocationParams back = location_from_vector(location_vector(loc), olos);
        CHECK(location_vector(back) == location_vector(loc));
        CHECK(channel_vector(channel_from_vector(channel_vector(channel_params_from_location(loc, s.bs)), olos)) ==
              channel_vector(channel_params_from_location(loc, s.bs)));
    }
    CHECK_THROWS_AS(location_from_vector(Eigen::VectorXd::Zero(6), false), Error);
}

TEST_CASE("transformation matrix matches numerical differentiation")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 40; ++i)
    {
        const bool olos = i % 3 == 0;
        const Scenario s = oracle::random_scenario(rng, olos ? 3 : i % 4, olos);
        const LocationParams loc = location_from_scenario(s, oracle::random_gains(rng, s.path_count()));
        const Eigen::MatrixXd T = transformation_matrix(loc, s.bs);
        const Eigen::VectorXd x = location_vector(loc);
        const Eigen::MatrixXd fd = oracle::jacobian_finite_difference(x, olos, s.bs, kLightSpeed, 1e-6);
        // Delay columns are O(1/c); compare them scaled by c.
        Eigen::MatrixXd diff = T - fd;
        for (Eigen::Index c = 0; c < diff.cols(); c += 5)
            diff.col(c) *= kLightSpeed;
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("OLOS subset drops the LOS path")
{
    const ChannelParamSet cp = params_from_scenario(reference_scene(), {1.0, 2.0});
    const ChannelParamSet o = olos_param_subset(cp);
    CHECK(o.olos);
    CHECK(o.size() == 1);
    ChannelParamSet los_only;
    los_only.paths.push_back(cp.paths[0]);
    CHECK_THROWS_AS(olos_param_subset(los_only), Error);
}
