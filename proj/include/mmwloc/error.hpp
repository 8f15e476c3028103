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

#ifndef MMWLOC_ERROR_HPP
#define MMWLOC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmwloc
{

enum class ErrorCode
{
    InvalidArgument,
    DegenerateGeometry,
    EmptyParamSet,
    DelayExceedsCp,
    ZeroSignal,
    SingularInput,
    DimensionMismatch,
    SingularFim,
    NoPathDetected,
    ZeroKernel,
    NonFinite,
    ZeroResponse,
    LinesNearParallel,
    LmDiverged,
    InsufficientPaths,
    SingularLinearSystem,
    InvalidConfig,
};

const char *to_string(ErrorCode code);

// All library failures are reported through this exception type; `code()` identifies the failure class.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline const char *to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyParamSet: return "EmptyParamSet";
    case ErrorCode::DelayExceedsCp: return "DelayExceedsCp";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularFim: return "SingularFim";
    case ErrorCode::NoPathDetected: return "NoPathDetected";
    case ErrorCode::ZeroKernel: return "ZeroKernel";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroResponse: return "ZeroResponse";
    case ErrorCode::LinesNearParallel: return "LinesNearParallel";
    case ErrorCode::LmDiverged: return "LmDiverged";
    case ErrorCode::InsufficientPaths: return "InsufficientPaths";
    case ErrorCode::SingularLinearSystem: return "SingularLinearSystem";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

} // namespace mmwloc

#endif
