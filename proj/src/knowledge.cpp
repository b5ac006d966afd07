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

#include "tomoplan/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tomoplan {

namespace {

constexpr double kSingularRatio = 1e-12;

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && std::abs(m(i, j)) > 1e-15) return false;
    }
  }
  return true;
}

// vec(U^dag X U) with row-major index I*d + J.
ComplexVector components(const ComplexMatrix& x, const ComplexMatrix& u) {
  const ComplexMatrix local = u.adjoint() * x * u;
  const auto d = local.rows();
  ComplexVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = local(i, j);
  }
  return v;
}

void require_interior(double w) {
  if (w < tol::kFloor) {
    throw Error(ErrorCode::TauNotInterior,
                "outcome probability " + std::to_string(w) + " of tau below the interior floor");
  }
}

}  // namespace

std::string_view mode_name(Mode mode) {
  return mode == Mode::Volume ? "volume" : "distance";
}

Mode parse_mode(std::string_view name) {
  if (name == "volume") return Mode::Volume;
  if (name == "distance") return Mode::Distance;
  throw Error(ErrorCode::InvalidArgument, "mode must be 'volume' or 'distance'");
}

StrategyConfig::StrategyConfig(std::vector<StrategyItem> items) : items_(std::move(items)) {
  if (items_.empty()) throw Error(ErrorCode::InvalidArgument, "strategy has no observables");
  const int d = items_.front().observable.dim();
  for (const auto& item : items_) {
    if (item.observable.dim() != d) throw Error(ErrorCode::DimMismatch, "strategy mixes dimensions");
    if (!(item.weight > 0.0) || !std::isfinite(item.weight)) {
      throw Error(ErrorCode::InvalidArgument, "strategy weights must be positive");
    }
    total_ += item.weight;
  }
}

StrategyConfig::StrategyConfig(std::vector<StrategyItem> items, double total)
    : StrategyConfig(std::move(items)) {
  if (std::abs(total_ - total) > 1e-9 * std::max(1.0, std::abs(total))) {
    throw Error(ErrorCode::InvalidArgument, "strategy weights do not sum to the total");
  }
  total_ = total;
}

TauEigenbasis tau_eigenbasis(const DensityMatrix& tau) {
  const int d = tau.dim();
  if (is_diagonal(tau.matrix())) {
    return {ComplexMatrix::Identity(d, d), tau.matrix().diagonal().real()};
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(tau.matrix());
  return {es.eigenvectors(), es.eigenvalues()};
}

KnowledgeOperator build_M(const DensityMatrix& tau, const StrategyConfig& strategy,
                          const BuildOptions& options) {
  const int d = tau.dim();
  if (strategy.dim() != d) throw Error(ErrorCode::DimMismatch, "strategy and tau dims differ");
  const int n_params = d * d - 1;

  KnowledgeOperator out;
  out.dim = d;
  out.matrix = RealMatrix::Zero(n_params, n_params);

  ComplexMatrix basis;
  if (options.with_components) {
    basis = options.eigenbasis ? *options.eigenbasis : tau_eigenbasis(tau).vectors;
    if (basis.rows() != d || basis.cols() != d) {
      throw Error(ErrorCode::DimMismatch, "eigenbasis has the wrong shape");
    }
    const ComplexMatrix local = basis.adjoint() * tau.matrix() * basis;
    if (!is_diagonal(local.unaryExpr([](Complex z) {
          return std::abs(z) < 1e-12 ? Complex(0.0) : z;
        }))) {
      throw Error(ErrorCode::InvalidArgument, "supplied basis does not diagonalize tau");
    }
    out.component_table = ComplexMatrix::Zero(d * d, d * d);
    out.eigenbasis = basis;
  }

  for (const auto& item : strategy.items()) {
    for (const auto& o : item.observable.outcomes()) {
      const double w = trace_product(tau.matrix(), o.projector);
      require_interior(w);
      // (tau|P) = 2 w; each outcome adds n/2 |P)(P| / (tau|P).
      const RealVector v = hs_coordinates(o.projector);
      out.matrix.noalias() += (item.weight / (4.0 * w)) * (v * v.transpose());
      if (out.component_table) {
        const ComplexVector p = components(o.projector, basis);
        out.component_table->noalias() += (item.weight / (2.0 * w)) * (p * p.adjoint());
      }
    }
  }
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(out.matrix, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  out.informationally_complete = hi > 0.0 && lo >= kSingularRatio * hi;
  return out;
}

RealMatrix restrict_components(const ComplexMatrix& table, const ComplexMatrix& eigenbasis) {
  const auto d = eigenbasis.rows();
  if (table.rows() != d * d || table.cols() != d * d) {
    throw Error(ErrorCode::DimMismatch, "component table does not match the basis");
  }
  const HermitianBasis hb = hermitian_basis(static_cast<int>(d));
  ComplexMatrix f(d * d, static_cast<Eigen::Index>(hb.traceless.size()));
  for (std::size_t r = 0; r < hb.traceless.size(); ++r) {
    f.col(static_cast<Eigen::Index>(r)) = components(hb.traceless[r], eigenbasis);
  }
  const ComplexMatrix m = 2.0 * (f.adjoint() * table * f);
  RealMatrix re = m.real();
  return 0.5 * (re + re.transpose());
}

ComplexMatrix augmented_table(const ComplexMatrix& table, double alpha) {
  const auto d2 = table.rows();
  const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(d2))));
  ComplexMatrix out = table;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out(i * d + i, k * d + k) += alpha / static_cast<double>(d);
  }
  return out;
}

double augmented_det(const KnowledgeOperator& m) {
  if (!m.component_table) throw Error(ErrorCode::MissingComponents, "no component table");
  auto det_odot = [](const ComplexMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (a + a.adjoint()),
                                                     Eigen::EigenvaluesOnly);
    return es.eigenvalues().prod();
  };
  return det_odot(augmented_table(*m.component_table, 1.0)) -
         det_odot(augmented_table(*m.component_table, 0.0));
}

double quadratic_form(const KnowledgeOperator& m, const DensityMatrix& rho,
                      const DensityMatrix& tau) {
  if (rho.dim() != m.dim || tau.dim() != m.dim) {
    throw Error(ErrorCode::DimMismatch, "state dims differ from the operator");
  }
  RealVector x;
  if (m.coordinates == Coordinates::BlochXYZ) {
    x = density_to_bloch(rho) - density_to_bloch(tau);
  } else {
    x = hs_coordinates(rho.matrix() - tau.matrix());
  }
  return x.dot(m.matrix * x);
}

double q_form(const DensityMatrix& rho, const ObservableSpec& a, const DensityMatrix& tau) {
  if (rho.dim() != a.dim() || tau.dim() != a.dim()) {
    throw Error(ErrorCode::DimMismatch, "q_form operands differ in dimension");
  }
  double q = 0.0;
  for (const auto& o : a.outcomes()) {
    const double wt = trace_product(tau.matrix(), o.projector);
    require_interior(wt);
    const double diff = trace_product(rho.matrix(), o.projector) - wt;
    q += diff * diff / wt;
  }
  return q;
}

KnowledgeReport knowledge_report(const RealMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimMismatch, "knowledge operator must be square");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  if (!(hi > 0.0) || ev.minCoeff() < kSingularRatio * hi) {
    throw Error(ErrorCode::SingularM, "knowledge operator is not positive definite");
  }
  const auto n = static_cast<double>(m.rows());
  KnowledgeReport r;
  r.log_det_M = ev.array().log().sum();
  r.det_M = ev.prod();
  if (!std::isfinite(r.det_M) || r.det_M == 0.0) r.det_M = std::exp(r.log_det_M);
  r.volume = std::exp(-0.5 * r.log_det_M);
  r.tr_M_inv = ev.cwiseInverse().sum();
  r.shannon = -0.5 * n + 0.5 * (r.log_det_M - n * std::log(2.0 * std::numbers::pi));
  return r;
}

KnowledgeReport knowledge_report(const KnowledgeOperator& m) {
  return knowledge_report(m.matrix);
}

ObservableSpec refine_observable(const ObservableSpec& a, double label,
                                 const ComplexMatrix& first, const ComplexMatrix& second,
                                 double first_label, double second_label) {
  constexpr double kTol = 1e-10;
  const auto idx = a.find(label);
  if (!idx) throw Error(ErrorCode::BadSplit, "label to refine is not an outcome");
  const ComplexMatrix& p = a[*idx].projector;
  if (first.rows() != p.rows() || second.rows() != p.rows() || first.cols() != p.cols() ||
      second.cols() != p.cols()) {
    throw Error(ErrorCode::BadSplit, "split projectors have the wrong shape");
  }
  if ((first + second - p).cwiseAbs().maxCoeff() > kTol) {
    throw Error(ErrorCode::BadSplit, "split projectors do not add up to the refined projector");
  }
  if ((first * second).cwiseAbs().maxCoeff() > kTol) {
    throw Error(ErrorCode::BadSplit, "split projectors are not orthogonal");
  }
  if (first_label == second_label) throw Error(ErrorCode::BadSplit, "new labels must differ");
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == *idx) continue;
    if (a[i].label == first_label || a[i].label == second_label) {
      throw Error(ErrorCode::BadSplit, "new labels collide with existing outcomes");
    }
    outcomes.push_back(a[i]);
  }
  outcomes.push_back({first_label, first});
  outcomes.push_back({second_label, second});
  try {
    return ObservableSpec(std::move(outcomes));
  } catch (const Error& e) {
    throw Error(ErrorCode::BadSplit, e.what());
  }
}

double validity_check(const DensityMatrix& tau, const KnowledgeOperator& m) {
  if (!tau.invertible()) throw Error(ErrorCode::TauNotInterior, "tau is not invertible");
  const KnowledgeReport r = knowledge_report(m);
  return std::sqrt(r.tr_M_inv / 2.0) / tau.min_eigenvalue();
}

std::size_t MeasurementRecord::add_observable(std::string id, ObservableSpec spec) {
  if (index_.contains(id)) throw Error(ErrorCode::InvalidArgument, "duplicate observable id " + id);
  if (!specs_.empty() && spec.dim() != specs_.front().dim()) {
    throw Error(ErrorCode::DimMismatch, "record mixes observable dimensions");
  }
  const std::size_t k = specs_.size();
  index_.emplace(id, k);
  ids_.push_back(std::move(id));
  specs_.push_back(std::move(spec));
  return k;
}

std::optional<std::size_t> MeasurementRecord::find_observable(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void MeasurementRecord::append(std::string_view id, double label) {
  const auto k = find_observable(id);
  if (!k) throw Error(ErrorCode::UnknownLabel, "unknown observable id " + std::string(id));
  const auto a = specs_[*k].find(label);
  if (!a) throw Error(ErrorCode::UnknownLabel, "label not in the outcome set of " + std::string(id));
  entries_.push_back({*k, *a});
}

void MeasurementRecord::append_outcome(std::size_t observable, std::size_t outcome) {
  if (observable >= specs_.size() || outcome >= specs_[observable].size()) {
    throw Error(ErrorCode::UnknownLabel, "record entry out of range");
  }
  entries_.push_back({observable, outcome});
}

std::vector<std::vector<std::size_t>> MeasurementRecord::counts() const {
  std::vector<std::vector<std::size_t>> c(specs_.size());
  for (std::size_t k = 0; k < specs_.size(); ++k) c[k].assign(specs_[k].size(), 0);
  for (const auto& e : entries_) ++c[e.observable][e.outcome];
  return c;
}

double log_posterior(const MeasurementRecord& record, const DensityMatrix& rho) {
  if (record.empty()) return 0.0;
  if (record.dim() != rho.dim()) throw Error(ErrorCode::DimMismatch, "record and state dims differ");
  const auto counts = record.counts();
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto& spec = record.observable(k);
    for (std::size_t a = 0; a < counts[k].size(); ++a) {
      if (counts[k][a] == 0) continue;
      const double w = trace_product(rho.matrix(), spec[a].projector);
      if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
      total += static_cast<double>(counts[k][a]) * std::log(w);
    }
  }
  return total;
}

}  // namespace tomoplan
