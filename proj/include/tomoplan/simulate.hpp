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

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tomoplan/highdim_strategies.hpp"
#include "tomoplan/knowledge.hpp"
#include "tomoplan/qubit_strategies.hpp"
#include "tomoplan/rng.hpp"

namespace tomoplan::sim {

/// Outcome indices drawn i.i.d. with probabilities Tr(tau P_a).
std::vector<std::size_t> sample_indices(const DensityMatrix& tau, const ObservableSpec& a,
                                        std::size_t count, Rng& rng);

/// Same draws as sample_indices, reported as labels.
std::vector<double> sample_outcomes(const DensityMatrix& tau, const ObservableSpec& a,
                                    std::size_t count, Rng& rng);

struct MlOptions {
  /// Lower bound on the estimate's eigenvalues.
  double eps_clip = 1e-6;
  int max_iterations = 1000;
  /// Stop when an iteration gains less than this (relative) in log-likelihood.
  double tolerance = 1e-13;
};

struct MlEstimate {
  DensityMatrix state;
  double log_likelihood;
  int iterations;
  /// Rank of the data's projectors in operator space is d^2 - 1.
  bool informationally_complete;
};

/// Maximizes the log-likelihood over states with eigenvalues >= eps_clip.
/// Starts from linear inversion, then projected Newton steps with
/// backtracking, falling back to projected gradient.
MlEstimate ml_estimate_full(const MeasurementRecord& record, int d, const MlOptions& options = {});
DensityMatrix ml_estimate(const MeasurementRecord& record, int d, const MlOptions& options = {});

/// Euclidean projection of a hermitian matrix onto {rho : Tr rho = 1,
/// rho >= floor}.
ComplexMatrix project_to_states(const ComplexMatrix& h, double floor);

/// Integer counts proportional to `weights` summing to `total`
/// (largest remainder, ties to the lower index).
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total);

struct Snapshot {
  /// Measurements taken before this batch.
  std::size_t n_before = 0;
  /// Estimate used to choose this batch.
  DensityMatrix estimate;
  std::vector<Vec3> axes;
  std::vector<std::size_t> counts;
};

struct TrialResult {
  DensityMatrix estimate;
  DensityMatrix true_state;
  /// Tr((estimate - true)^2).
  double squared_error = 0.0;
  /// |u_hat - u|^2; qubits only.
  std::optional<double> bloch_squared_error;
  std::size_t n_used = 0;
  std::uint64_t seed = 0;
  std::vector<Snapshot> trajectory;
};

struct AdaptiveOptions {
  std::size_t batch = 500;
  MlOptions ml;
};

/// Pilot batch split over x, y, z; then per batch: estimate, rotate the frame
/// minimally so c3 follows the estimate, allocate by the lemma ratios.
TrialResult run_adaptive_qubit(const BlochVector& u_true, std::size_t n_total, Mode mode,
                               std::uint64_t seed, const AdaptiveOptions& options = {});

/// Non-adaptive: each observable measured round(n_beta) times (largest
/// remainder on the total), one estimate at the end.
TrialResult run_fixed(const DensityMatrix& tau_true, const StrategyConfig& strategy,
                      std::uint64_t seed, const MlOptions& options = {});

enum class ErrorMetric { HilbertSchmidt, Bloch };

struct EnsembleStats {
  std::size_t trials = 0;
  double mean_sq_error = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string mode;
};

EnsembleStats aggregate(const std::vector<TrialResult>& trials, ErrorMetric metric,
                        std::string mode = "");

/// fn(0), ..., fn(count - 1) on up to `threads` threads, results in index
/// order. The first exception (by index) is rethrown.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        slots[k].emplace(fn(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    out.push_back(std::move(*slots[k]));
  }
  return out;
}

/// Runs trial(k, derive_seed(base_seed, k)) for k < count on up to `threads`
/// threads. Results are in trial order and do not depend on `threads`.
std::vector<TrialResult> run_ensemble(
    std::size_t count, std::uint64_t base_seed, unsigned threads,
    const std::function<TrialResult(std::size_t, std::uint64_t)>& trial);

struct EscalationOptions {
  /// Hard cap on measurements.
  std::size_t budget = 1'000'000;
  /// Test each new basis vector before keeping it.
  bool refine = false;
  std::size_t refine_shots = 100;
  /// Minimal estimated probability mass for a kept vector.
  double refine_threshold = 0.01;
};

struct EscalationResult {
  int d_eff = 0;
  /// Measurements spent, including refinement shots.
  std::size_t n0 = 0;
  /// 1-based index of the first measurement landing inside P; 0 if none.
  std::size_t first_hit = 0;
  /// Ramp positions (0-based) spanning P.
  std::vector<int> kept;
  std::vector<int> rejected;
  /// Orthogonal projector onto the kept vectors.
  ComplexMatrix projector;
  /// Consecutive in-P outcomes required by the stopping test.
  std::size_t required_run = 0;
};

/// Consecutive in-P outcomes m needed so that 1 - Tr(tau P) <= eps0^2/2 at
/// 95% confidence: the smallest m with (1 - eps0^2/2)^m <= 0.05.
std::size_t required_run(double eps0);

/// Grows P_d along the ramp e_1, e_2, ... : measure {P_d, 1 - P_d}; outcome
/// 0 adds the next vector, a long enough run of 1s stops.
EscalationResult dimension_escalation(const DensityMatrix& tau_big, double eps0,
                                      std::uint64_t seed, const EscalationOptions& options = {});

struct EscalationTrial {
  EscalationResult escalation;
  /// Estimate embedded in the full space.
  DensityMatrix estimate;
  /// sqrt(Tr((estimate - tau)^2)).
  double distance = 0.0;
  /// Tomography shots, including those landing outside P.
  std::size_t tomography_shots = 0;
};

/// Escalation followed by tomography inside P with the strategy-1
/// observables (equal split, tracial guess), embedded as A + (1 - P);
/// outcomes outside P are discarded.
EscalationTrial escalate_and_estimate(const DensityMatrix& tau_big, double eps0,
                                      std::size_t n_tomography, std::uint64_t seed,
                                      const EscalationOptions& options = {});

}  // namespace tomoplan::sim
