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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomoplan/operator_core.hpp"

namespace tomoplan {

/// Which knowledge measure a strategy is tuned for.
enum class Mode {
  /// maximize det M
  Volume,
  /// minimize Tr(M^-1)
  Distance,
};

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

struct StrategyItem {
  ObservableSpec observable;
  double weight;
};

/// Observables B_beta with measurement counts n_beta (treated as reals).
class StrategyConfig {
 public:
  explicit StrategyConfig(std::vector<StrategyItem> items);
  /// Also checks that the weights sum to `total` within 1e-9 (relative).
  StrategyConfig(std::vector<StrategyItem> items, double total);

  int dim() const { return items_.front().observable.dim(); }
  double total() const { return total_; }
  const std::vector<StrategyItem>& items() const { return items_; }

 private:
  std::vector<StrategyItem> items_;
  double total_ = 0.0;
};

enum class Coordinates {
  /// Traceless elements of hermitian_basis(d), in that order.
  HermitianBasis,
  /// Bloch coordinates (x, y, z); qubit only.
  BlochXYZ,
};

/// The quadratic form M on traceless hermitian operators. `matrix` holds
/// (F_r|M|F_s) for an orthonormal basis F. When built with components,
/// `component_table` holds M_{IJ,KL} (index I*d + J) of the alpha = 0
/// extension to all operators, taken in the basis given by the columns of
/// `eigenbasis`.
struct KnowledgeOperator {
  int dim = 0;
  RealMatrix matrix;
  Coordinates coordinates = Coordinates::HermitianBasis;
  std::optional<ComplexMatrix> component_table;
  ComplexMatrix eigenbasis;
  bool informationally_complete = true;
};

struct TauEigenbasis {
  ComplexMatrix vectors;
  RealVector values;
};

/// Eigenvectors of tau as columns. A diagonal tau keeps the computational
/// basis and its diagonal order; otherwise eigenvalues come out ascending.
TauEigenbasis tau_eigenbasis(const DensityMatrix& tau);

struct BuildOptions {
  bool with_components = true;
  /// Must diagonalize tau; defaults to tau_eigenbasis(tau).
  std::optional<ComplexMatrix> eigenbasis;
};

KnowledgeOperator build_M(const DensityMatrix& tau, const StrategyConfig& strategy,
                          const BuildOptions& options = {});

/// Real-basis restriction (F_r|M_odot|F_s) = 2 Re(f_r^dag A f_s) of a
/// component table expressed in `eigenbasis`.
RealMatrix restrict_components(const ComplexMatrix& table, const ComplexMatrix& eigenbasis);

/// M_odot(alpha) = table + alpha * P with P_{IJ,KL} = delta_IJ delta_KL / d.
ComplexMatrix augmented_table(const ComplexMatrix& table, double alpha);

/// det M recovered from the alpha-affinity of det_odot M_odot(alpha):
/// det_odot M_odot(1) - det_odot M_odot(0).
double augmented_det(const KnowledgeOperator& m);

/// (rho - tau | M | rho - tau), evaluated in M's coordinates.
double quadratic_form(const KnowledgeOperator& m, const DensityMatrix& rho,
                      const DensityMatrix& tau);

/// sum_a (w_a(rho) - w_a(tau))^2 / w_a(tau).
double q_form(const DensityMatrix& rho, const ObservableSpec& a, const DensityMatrix& tau);

struct KnowledgeReport {
  double det_M = 0.0;
  double log_det_M = 0.0;
  double volume = 0.0;
  double tr_M_inv = 0.0;
  double shannon = 0.0;
};

KnowledgeReport knowledge_report(const KnowledgeOperator& m);
KnowledgeReport knowledge_report(const RealMatrix& m);

/// Replaces outcome `label` of `a` by two outcomes splitting its projector.
ObservableSpec refine_observable(const ObservableSpec& a, double label,
                                 const ComplexMatrix& first, const ComplexMatrix& second,
                                 double first_label, double second_label);

/// sqrt(Tr(M^-1)/2) * ||tau^-1||; the Gaussian approximation needs this << 1.
double validity_check(const DensityMatrix& tau, const KnowledgeOperator& m);

/// Ordered measurement outcomes together with the observables they refer to.
class MeasurementRecord {
 public:
  struct Entry {
    std::size_t observable;
    std::size_t outcome;
  };

  explicit MeasurementRecord(std::uint64_t seed = 0) : seed_(seed) {}

  /// Registers an observable under a fresh id and returns its index.
  std::size_t add_observable(std::string id, ObservableSpec spec);
  std::optional<std::size_t> find_observable(std::string_view id) const;

  void append(std::string_view id, double label);
  void append_outcome(std::size_t observable, std::size_t outcome);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t observable_count() const { return specs_.size(); }
  const std::string& id(std::size_t observable) const { return ids_.at(observable); }
  const ObservableSpec& observable(std::size_t index) const { return specs_.at(index); }
  double label(const Entry& e) const { return specs_.at(e.observable)[e.outcome].label; }
  std::uint64_t seed() const { return seed_; }
  /// 0 when the record has no observables.
  int dim() const { return specs_.empty() ? 0 : specs_.front().dim(); }

  /// counts()[k][a]: how often outcome a of observable k was recorded.
  std::vector<std::vector<std::size_t>> counts() const;

 private:
  std::uint64_t seed_;
  std::vector<std::string> ids_;
  std::vector<ObservableSpec> specs_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<Entry> entries_;
};

/// sum_j ln w_{a_j}(rho, A_j) under a flat prior; -infinity if any recorded
/// outcome has probability <= 0.
double log_posterior(const MeasurementRecord& record, const DensityMatrix& rho);

}  // namespace tomoplan
