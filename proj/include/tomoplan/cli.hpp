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

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomoplan/operator_core.hpp"

namespace tomoplan::cli {

/// Runs one command line; args[0] is the program name. Exit codes: 0 on
/// success or --help, 1 on a numerical failure, 2 on invalid arguments.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

/// `tracial`, `bloch:x,y,z`, `diag:p1,...,pd`, `file:<path>`, `basis:K`
/// (1-based basis vector) or `small-a:A`. `dim` is required for `tracial`,
/// `basis` and `small-a`; a shorter `diag` list is zero-padded to `dim`.
DensityMatrix parse_state(std::string_view descriptor, std::optional<int> dim);

}  // namespace tomoplan::cli
