// Copyright 2026 The tomoplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomoplan {

enum class ErrorCode {
  NotHermitian,
  DimMismatch,
  OutOfBall,
  InvalidState,
  InvalidObservable,
  InvalidArgument,
  TauNotInterior,
  SingularM,
  BadSplit,
  RankDeficient,
  NoConvergence,
  MissingComponents,
  SingularR,
  OddDimension,
  BudgetExceeded,
  EmptyEnsemble,
  UnknownLabel,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::OutOfBall: return "OutOfBall";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidObservable: return "InvalidObservable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TauNotInterior: return "TauNotInterior";
    case ErrorCode::SingularM: return "SingularM";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MissingComponents: return "MissingComponents";
    case ErrorCode::SingularR: return "SingularR";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` names
/// the failure kind so callers (and the CLI) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tomoplan
