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

// Randomized property checks shared by the unit tests and the acceptance binary.

#ifndef MMWLOC_TESTS_PROPERTIES_HPP
#define MMWLOC_TESTS_PROPERTIES_HPP

#include <cstdint>
#include <string>

namespace properties
{

struct Report
{
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    void fail(const std::string &why)
    {
        if (failures++ == 0)
            first_failure = why;
    }
};

// Residual energy of DCS-SOMP never increases from one selected atom to the next.
Report somp_residual_monotone(int cases, std::uint64_t seed);
// SAGE residual energy (negative log-likelihood up to constants) never increases across sweeps.
Report sage_likelihood_monotone(int cases, std::uint64_t seed);
// Costs of accepted Levenberg-Marquardt steps strictly decrease.
Report lma_accepted_monotone(int cases, std::uint64_t seed);
// Channel and location FIMs are symmetric and positive semidefinite.
Report fim_symmetric_psd(int cases, std::uint64_t seed);
// Pilots, observations and whole trials are reproducible from their seeds.
Report deterministic_under_seed(int cases, std::uint64_t seed);

} // namespace properties

#endif
