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

#include <string>
#include <utility>
#include <vector>

#include "tomoplan/knowledge.hpp"

namespace tomoplan::highdim {

/// M' after averaging over the unitaries commuting with tau, split into the
/// diagonal sector R (components II,JJ) and the off-diagonal sector S
/// (components IJ,IJ, I != J).
struct TwirledOperator {
  int dim = 0;
  RealMatrix R;
  /// S(I,J), ordered pairs I != J, lexicographic; see pair_index().
  RealVector S;
  ComplexMatrix eigenbasis;
};

/// Position of ordered pair (I, J), I != J, 0-based, in TwirledOperator::S.
int pair_index(int d, int i, int j);

/// Keeps only the (II,JJ) and (IJ,IJ) components of M's table.
TwirledOperator twirl(const KnowledgeOperator& m, const DensityMatrix& tau);

/// Component table of R (+) S in its eigenbasis.
ComplexMatrix twirled_table(const TwirledOperator& t);

/// Dense real-basis matrix of the twirled operator.
KnowledgeOperator twirled_operator(const TwirledOperator& t);

struct StrategyMetrics {
  std::string strategy;
  Mode mode = Mode::Volume;
  double det_M = 0.0;
  double log_det_M = 0.0;
  double tr_M_inv = 0.0;
  std::vector<double> splits;
};

/// det M' = det R Tr(R^-1 E) det S / d and
/// Tr M'^-1 = Tr R^-1 - Tr(R^-1 E R^-1) / Tr(R^-1 E) + Tr S^-1.
/// Both are invariant under R -> R + cE; a singular R is shifted by
/// c = Tr(R)/d before giving up.
StrategyMetrics block_measures(const TwirledOperator& t, std::vector<double> splits = {});

/// sum_IJ (-1)^(I+J) det R with row I and column J deleted.
double cofactor_sum(const RealMatrix& r);

/// Eigenbasis in which strategies are built. Degenerate spectra get the
/// solver's basis, i.e. the limit of tau plus a vanishing diagonal ramp.
ComplexMatrix strategy_eigenbasis(const DensityMatrix& tau);

/// Discrete Fourier transform of the tau eigenbasis; |<e_I|f_a>|^2 = 1/d.
ObservableSpec unbiased_partner(const DensityMatrix& tau);

/// First d elements of the Mian-Chowla sequence, shifted to start at 0. All
/// pairwise sums are distinct.
std::vector<int> sidon_spectrum(int d);

/// Copies of `observable` rotated by exp(i phi_k xi), xi = sidon_spectrum in
/// `eigenbasis`, phi_k = 2 pi k / K with K = 2 max(xi) + 1, each with weight
/// `weight / K`. Their M equals the twirl of `observable`'s M.
std::vector<StrategyItem> twirl_copies(const ObservableSpec& observable,
                                       const ComplexMatrix& eigenbasis, double weight);

struct Strategy1Split {
  double n1 = 0.0;
  double n2 = 0.0;
};

Strategy1Split strategy1_split(const DensityMatrix& tau, double n, Mode mode);

/// B1 = tau eigenbasis (n1) and its unbiased partner (n2), untwirled.
StrategyConfig strategy1_config(const DensityMatrix& tau, double n1, double n2);

/// B1 plus twirl_copies of B2: a finite list of observables realizing M'.
StrategyConfig strategy1_realization(const DensityMatrix& tau, double n1, double n2);

/// Built from build_M + twirl + block_measures at the optimal split.
StrategyMetrics strategy1(const DensityMatrix& tau, double n, Mode mode);

/// d^(d^2-d-1) (n/(2(d+1)))^(d^2-1) det tau^-1 for Volume,
/// (2/n) (sqrt(1 - Tr tau^2) + sqrt(d(d-1)))^2 for Distance.
double strategy1_closed_form(const DensityMatrix& tau, double n, Mode mode);

/// d-1 perfect matchings of {1..d} covering every pair once.
struct PairSchedule {
  int dim = 0;
  std::vector<std::vector<std::pair<int, int>>> rounds;
};

/// Circle method: 1 stays fixed, the others rotate.
PairSchedule round_robin(int d);

bool covers_all_pairs(const PairSchedule& schedule);

/// One observable per round, built from P+-_IJ = (e_II +- e_IJ +- e_JI + e_JJ)/2
/// in `eigenbasis`.
std::vector<ObservableSpec> strategy2_observables(const ComplexMatrix& eigenbasis,
                                                  const PairSchedule& schedule);

/// B1 = tau eigenbasis with n1 (omitted when 0) plus the round observables.
StrategyConfig strategy2_config(const DensityMatrix& tau, double n1,
                                const std::vector<double>& round_weights);

/// R and S assembled from the matrix-unit contribution formulas.
TwirledOperator strategy2_blocks(const DensityMatrix& tau, double n1,
                                 const std::vector<double>& round_weights);

StrategyMetrics strategy2(const DensityMatrix& tau, double n1,
                          const std::vector<double>& round_weights, Mode mode = Mode::Volume);

/// n1 = 0 and n' = n/(d-1) on every round.
StrategyMetrics strategy2_uniform(const DensityMatrix& tau, double n, Mode mode);

/// Tracial state with uniform round weight n'.
double strategy2_tracial_det(int d, double n1, double n_prime);
double strategy2_tracial_tr(int d, double n1, double n_prime);
/// Optima at n1 = 0, n' = n/(d-1).
double strategy2_tracial_optimum(int d, double n, Mode mode);

/// 4 (d-1)^2 / n.
double strategy2_lower_bound(int d, double n);

/// tau_11 = tau_22 = a/2, remaining diagonal entries (1-a)/(d-2).
DensityMatrix small_a_state(int d, double a);

}  // namespace tomoplan::highdim
