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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tomoplan/knowledge.hpp"

namespace tomoplan::qubit {

using tomoplan::Mode;
using tomoplan::mode_name;
using tomoplan::parse_mode;

/// Unit axes c_beta with (real) measurement counts n_beta.
struct QubitConfig {
  std::vector<Vec3> axes;
  std::vector<double> weights;
  double total = 0.0;

  void validate() const;
};

struct QubitOptimum {
  QubitConfig config;
  Mode mode = Mode::Volume;
  /// det M for Volume, Tr(M^-1) for Distance.
  double value = 0.0;
  /// Two transverse eigenvalues, then the one along u.
  Vec3 eigenvalues = Vec3::Zero();
};

/// M_rs = sum_beta n_beta c_r c_s / (1 - (u.c_beta)^2) in Bloch coordinates.
KnowledgeOperator qubit_M(const BlochVector& u, const QubitConfig& config);
RealMatrix qubit_matrix(const BlochVector& u, const QubitConfig& config);

/// Orthonormal frame with third axis along u. The frame is the image of
/// (x, y, z) under the minimal rotation taking z to u/|u|; u = 0 gives
/// (x, y, z) itself.
std::array<Vec3, 3> frame_along(const BlochVector& u);

/// Minimal rotation (about the common normal) taking unit vector `from` to
/// unit vector `to`.
Eigen::Matrix3d minimal_rotation(const Vec3& from, const Vec3& to);

/// Best volume-oriented configuration: orthonormal frame along u with
/// n/3 counts each; det M = (n/3)^3 / (1 - u^2).
QubitOptimum lemma1_optimum(const BlochVector& u, double n);

/// Best distance-oriented configuration: with s = sqrt(1 - u^2), counts
/// (n, n, n s) / (2 + s) and Tr(M^-1) = (2 + s)^2 / n.
QubitOptimum lemma2_optimum(const BlochVector& u, double n);

QubitOptimum lemma_optimum(const BlochVector& u, double n, Mode mode);

/// Objective value of an arbitrary configuration for the given mode.
double config_value(const BlochVector& u, const QubitConfig& config, Mode mode);

/// Largest relative residual of the Lagrange stationarity conditions (weight
/// and axis equations) over all beta with n_beta > 0. Multipliers are
/// C_beta = 2 n_beta c / (1 - (u.c_beta)^2) with c = 3/n (Volume) or
/// c = Tr(M^-1)/n (Distance).
double stationarity_residual(const BlochVector& u, const QubitConfig& config, Mode mode);

struct OptimizerOptions {
  int restarts = 32;
  int iterations = 2000;
  std::uint64_t seed = 1;
};

struct NumericOptimum {
  QubitConfig config;
  double value = 0.0;
  int best_restart = 0;
  std::vector<double> restart_values;
};

/// Multi-start projected gradient search over m unit axes and nonnegative
/// weights summing to n. Independent of the closed forms above.
NumericOptimum optimize_config_numeric(const BlochVector& u, double n, int m, Mode mode,
                                       const OptimizerOptions& options = {});

}  // namespace tomoplan::qubit
