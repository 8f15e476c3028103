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

#include "properties.hpp"

TEST_CASE("FIM is symmetric and positive semidefinite")
{
    const properties::Report r = properties::fim_symmetric_psd(100, 4);
    CHECK(r.cases == 100);
    CHECK_MESSAGE(r.failures == 0, r.first_failure);
}

TEST_CASE("determinism under seed")
{
    const properties::Report r = properties::deterministic_under_seed(30, 5);
    CHECK_MESSAGE(r.failures == 0, r.first_failure);
}
