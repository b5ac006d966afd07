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

#include "tomoplan/highdim_strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace tomoplan::highdim {

namespace {

constexpr double kSingular = 1e-12;

void require_even(int d) {
  if (d < 2 || d % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "dimension must be even and >= 2, got " + std::to_string(d));
  }
}

void require_invertible(const DensityMatrix& tau) {
  if (!tau.invertible()) {
    throw Error(ErrorCode::TauNotInterior, "tau has an eigenvalue below the interior floor");
  }
}

RealVector diagonal_in(const DensityMatrix& tau, const ComplexMatrix& basis) {
  return (basis.adjoint() * tau.matrix() * basis).diagonal().real();
}

double log_det_tau(const DensityMatrix& tau) {
  return tau.eigenvalues().array().log().sum();
}

}  // namespace

int pair_index(int d, int i, int j) { return i * (d - 1) + (j < i ? j : j - 1); }

TwirledOperator twirl(const KnowledgeOperator& m, const DensityMatrix& tau) {
  if (!m.component_table) {
    throw Error(ErrorCode::MissingComponents, "knowledge operator was built without components");
  }
  const int d = m.dim;
  if (tau.dim() != d) throw Error(ErrorCode::DimMismatch, "tau and M dims differ");
  const ComplexMatrix local = m.eigenbasis.adjoint() * tau.matrix() * m.eigenbasis;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j && std::abs(local(i, j)) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "components are not in a tau eigenbasis");
      }
    }
  }
  const ComplexMatrix& a = *m.component_table;
  TwirledOperator t;
  t.dim = d;
  t.eigenbasis = m.eigenbasis;
  t.R = RealMatrix(d, d);
  t.S = RealVector(d * (d - 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      t.R(i, j) = a(i * d + i, j * d + j).real();
      if (i != j) t.S(pair_index(d, i, j)) = a(i * d + j, i * d + j).real();
    }
  }
  t.R = 0.5 * (t.R + t.R.transpose()).eval();
  return t;
}

ComplexMatrix twirled_table(const TwirledOperator& t) {
  const int d = t.dim;
  ComplexMatrix a = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      a(i * d + i, j * d + j) = t.R(i, j);
      if (i != j) a(i * d + j, i * d + j) = t.S(pair_index(d, i, j));
    }
  }
  return a;
}

KnowledgeOperator twirled_operator(const TwirledOperator& t) {
  KnowledgeOperator m;
  m.dim = t.dim;
  m.component_table = twirled_table(t);
  m.eigenbasis = t.eigenbasis;
  m.matrix = restrict_components(*m.component_table, t.eigenbasis);
  return m;
}

StrategyMetrics block_measures(const TwirledOperator& t, std::vector<double> splits) {
  const int d = t.dim;
  StrategyMetrics out;
  out.splits = std::move(splits);
  for (Eigen::Index k = 0; k < t.S.size(); ++k) {
    if (!(t.S(k) > 0.0)) throw Error(ErrorCode::SingularM, "S block has a non-positive entry");
  }

  RealMatrix r = t.R;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(r);
  auto singular = [](const RealVector& ev) {
    const double big = ev.cwiseAbs().maxCoeff();
    return !(ev.cwiseAbs().minCoeff() > kSingular * big);
  };
  if (singular(es.eigenvalues())) {
    const double c = std::max(std::abs(r.trace()) / d, 1.0);
    r.array() += c;
    es.compute(r);
    if (singular(es.eigenvalues())) {
      throw Error(ErrorCode::SingularR, "R is singular on the trace-orthogonal subspace");
    }
  }
  const RealVector ev = es.eigenvalues();
  const RealMatrix& v = es.eigenvectors();
  // In R's eigenbasis: e -> v^T e.
  const RealVector ve = v.transpose() * RealVector::Ones(d);
  const double t_e = (ve.array().square() / ev.array()).sum();
  const double t_ee = (ve.array().square() / ev.array().square()).sum();
  if (!(t_e > 0.0)) throw Error(ErrorCode::SingularM, "Tr(R^-1 E) is not positive");

  double sign = 1.0;
  double log_abs_det_r = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) sign = -sign;
    log_abs_det_r += std::log(std::abs(ev(k)));
  }
  if (sign < 0.0) throw Error(ErrorCode::SingularM, "block determinant is negative");
  out.log_det_M = log_abs_det_r + std::log(t_e) - std::log(static_cast<double>(d)) +
                  t.S.array().log().sum();
  out.det_M = std::exp(out.log_det_M);
  out.tr_M_inv = ev.cwiseInverse().sum() - t_ee / t_e + t.S.cwiseInverse().sum();
  return out;
}

double cofactor_sum(const RealMatrix& r) {
  const auto d = r.rows();
  if (d == 1) return 1.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      RealMatrix minor(d - 1, d - 1);
      for (Eigen::Index a = 0, ra = 0; a < d; ++a) {
        if (a == i) continue;
        for (Eigen::Index b = 0, cb = 0; b < d; ++b) {
          if (b == j) continue;
          minor(ra, cb++) = r(a, b);
        }
        ++ra;
      }
      const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      sum += sign * minor.determinant();
    }
  }
  return sum;
}

ComplexMatrix strategy_eigenbasis(const DensityMatrix& tau) {
  // For a degenerate tau, the solver's basis is the eigenbasis of tau plus a
  // vanishing ramp along its columns; probabilities always use exact tau.
  return tau_eigenbasis(tau).vectors;
}

ObservableSpec unbiased_partner(const DensityMatrix& tau) {
  require_invertible(tau);
  const int d = tau.dim();
  const ComplexMatrix v = strategy_eigenbasis(tau);
  ComplexMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < d; ++a) {
      f(i, a) = std::polar(norm, 2.0 * std::numbers::pi * ((i * a) % d) / d);
    }
  }
  return ObservableSpec::from_basis(v * f);
}

std::vector<int> sidon_spectrum(int d) {
  std::vector<int> seq;
  std::set<int> sums;
  for (int candidate = 1; static_cast<int>(seq.size()) < d; ++candidate) {
    std::vector<int> fresh;
    bool ok = true;
    for (int x : seq) {
      if (sums.count(x + candidate) != 0) {
        ok = false;
        break;
      }
      fresh.push_back(x + candidate);
    }
    fresh.push_back(2 * candidate);
    if (!ok || sums.count(2 * candidate) != 0) continue;
    sums.insert(fresh.begin(), fresh.end());
    seq.push_back(candidate);
  }
  for (int& x : seq) x -= 1;
  return seq;
}

std::vector<StrategyItem> twirl_copies(const ObservableSpec& observable,
                                       const ComplexMatrix& eigenbasis, double weight) {
  const int d = observable.dim();
  const std::vector<int> xi = sidon_spectrum(d);
  const int copies = 2 * xi.back() + 1;
  std::vector<StrategyItem> items;
  items.reserve(static_cast<std::size_t>(copies));
  for (int k = 0; k < copies; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / copies;
    ComplexVector phases(d);
    for (int i = 0; i < d; ++i) phases(i) = std::polar(1.0, phi * xi[static_cast<std::size_t>(i)]);
    const ComplexMatrix u = eigenbasis * phases.asDiagonal() * eigenbasis.adjoint();
    std::vector<Outcome> outcomes;
    for (const auto& o : observable.outcomes()) {
      ComplexMatrix p = u * o.projector * u.adjoint();
      p = (0.5 * (p + p.adjoint())).eval();
      outcomes.push_back({o.label, std::move(p)});
    }
    items.push_back({ObservableSpec(std::move(outcomes)), weight / copies});
  }
  return items;
}

Strategy1Split strategy1_split(const DensityMatrix& tau, double n, Mode mode) {
  require_invertible(tau);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const double d = tau.dim();
  Strategy1Split s;
  if (mode == Mode::Volume) {
    s.n1 = n / (d + 1.0);
  } else {
    const double mixedness = 1.0 - tau.purity();
    s.n1 = n / (1.0 + std::sqrt(d * (d - 1.0) / mixedness));
  }
  s.n2 = n - s.n1;
  return s;
}

StrategyConfig strategy1_config(const DensityMatrix& tau, double n1, double n2) {
  require_invertible(tau);
  std::vector<StrategyItem> items;
  items.push_back({ObservableSpec::from_basis(strategy_eigenbasis(tau)), n1});
  items.push_back({unbiased_partner(tau), n2});
  return StrategyConfig(std::move(items));
}

StrategyConfig strategy1_realization(const DensityMatrix& tau, double n1, double n2) {
  require_invertible(tau);
  const ComplexMatrix v = strategy_eigenbasis(tau);
  std::vector<StrategyItem> items;
  items.push_back({ObservableSpec::from_basis(v), n1});
  for (auto& item : twirl_copies(unbiased_partner(tau), v, n2)) items.push_back(std::move(item));
  return StrategyConfig(std::move(items), n1 + n2);
}

StrategyMetrics strategy1(const DensityMatrix& tau, double n, Mode mode) {
  const Strategy1Split s = strategy1_split(tau, n, mode);
  BuildOptions options;
  options.eigenbasis = strategy_eigenbasis(tau);
  const KnowledgeOperator m = build_M(tau, strategy1_config(tau, s.n1, s.n2), options);
  StrategyMetrics out = block_measures(twirl(m, tau), {s.n1, s.n2});
  out.strategy = "strategy1";
  out.mode = mode;
  return out;
}

double strategy1_closed_form(const DensityMatrix& tau, double n, Mode mode) {
  require_invertible(tau);
  const double d = tau.dim();
  if (mode == Mode::Volume) {
    return std::exp((d * d - d - 1.0) * std::log(d) +
                    (d * d - 1.0) * std::log(n / (2.0 * (d + 1.0))) - log_det_tau(tau));
  }
  const double root = std::sqrt(1.0 - tau.purity()) + std::sqrt(d * (d - 1.0));
  return 2.0 / n * root * root;
}

PairSchedule round_robin(int d) {
  require_even(d);
  PairSchedule s;
  s.dim = d;
  const int ring = d - 1;
  for (int r = 0; r < ring; ++r) {
    std::vector<std::pair<int, int>> round;
    round.emplace_back(1, 2 + r);
    for (int k = 1; k < d / 2; ++k) {
      const int a = 2 + (r + k) % ring;
      const int b = 2 + (r - k + ring) % ring;
      round.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(round.begin(), round.end());
    s.rounds.push_back(std::move(round));
  }
  return s;
}

bool covers_all_pairs(const PairSchedule& schedule) {
  const int d = schedule.dim;
  if (d < 2 || d % 2 != 0 || static_cast<int>(schedule.rounds.size()) != d - 1) return false;
  std::vector<int> seen(static_cast<std::size_t>(d * d), 0);
  for (const auto& round : schedule.rounds) {
    if (static_cast<int>(round.size()) != d / 2) return false;
    std::vector<bool> used(static_cast<std::size_t>(d + 1), false);
    for (auto [a, b] : round) {
      if (a < 1 || b < 1 || a > d || b > d || a == b) return false;
      if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)]) return false;
      used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
      ++seen[static_cast<std::size_t>((std::min(a, b) - 1) * d + std::max(a, b) - 1)];
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (seen[static_cast<std::size_t>(i * d + j)] != 1) return false;
    }
  }
  return true;
}

std::vector<ObservableSpec> strategy2_observables(const ComplexMatrix& eigenbasis,
                                                  const PairSchedule& schedule) {
  std::vector<ObservableSpec> out;
  for (const auto& round : schedule.rounds) {
    std::vector<Outcome> outcomes;
    double label = 1.0;
    for (auto [a, b] : round) {
      const ComplexVector ei = eigenbasis.col(a - 1);
      const ComplexVector ej = eigenbasis.col(b - 1);
      outcomes.push_back({label, rank_one_projector((ei + ej) / std::sqrt(2.0))});
      outcomes.push_back({-label, rank_one_projector((ei - ej) / std::sqrt(2.0))});
      label += 1.0;
    }
    out.emplace_back(std::move(outcomes));
  }
  return out;
}

StrategyConfig strategy2_config(const DensityMatrix& tau, double n1,
                                const std::vector<double>& round_weights) {
  const int d = tau.dim();
  require_even(d);
  if (static_cast<int>(round_weights.size()) != d - 1) {
    throw Error(ErrorCode::InvalidArgument, "need one weight per round (d-1)");
  }
  const ComplexMatrix v = strategy_eigenbasis(tau);
  std::vector<StrategyItem> items;
  if (n1 > 0.0) items.push_back({ObservableSpec::from_basis(v), n1});
  const auto observables = strategy2_observables(v, round_robin(d));
  for (std::size_t r = 0; r < observables.size(); ++r) {
    if (round_weights[r] > 0.0) items.push_back({observables[r], round_weights[r]});
  }
  return StrategyConfig(std::move(items));
}

TwirledOperator strategy2_blocks(const DensityMatrix& tau, double n1,
                                 const std::vector<double>& round_weights) {
  const int d = tau.dim();
  require_even(d);
  if (static_cast<int>(round_weights.size()) != d - 1) {
    throw Error(ErrorCode::InvalidArgument, "need one weight per round (d-1)");
  }
  if (!(n1 >= 0.0) || std::any_of(round_weights.begin(), round_weights.end(),
                                  [](double w) { return !(w >= 0.0); })) {
    throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
  }
  const ComplexMatrix v = strategy_eigenbasis(tau);
  const RealVector t = diagonal_in(tau, v);

  // beta(I, J): the round containing the pair.
  std::vector<int> round_of(static_cast<std::size_t>(d * d), -1);
  const PairSchedule schedule = round_robin(d);
  for (std::size_t r = 0; r < schedule.rounds.size(); ++r) {
    for (auto [a, b] : schedule.rounds[r]) {
      round_of[static_cast<std::size_t>((a - 1) * d + b - 1)] = static_cast<int>(r);
      round_of[static_cast<std::size_t>((b - 1) * d + a - 1)] = static_cast<int>(r);
    }
  }

  TwirledOperator out;
  out.dim = d;
  out.eigenbasis = v;
  out.R = RealMatrix::Zero(d, d);
  out.S = RealVector(d * (d - 1));
  for (int i = 0; i < d; ++i) {
    if (n1 > 0.0) {
      if (t(i) < tol::kFloor) throw Error(ErrorCode::TauNotInterior, "tau eigenvalue below floor");
      out.R(i, i) += n1 / (2.0 * t(i));
    }
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const double w = 0.5 * (t(i) + t(j));
      if (w < tol::kFloor) throw Error(ErrorCode::TauNotInterior, "pair probability below floor");
      const double nb = round_weights[static_cast<std::size_t>(round_of[static_cast<std::size_t>(i * d + j)])];
      const double c = nb / (2.0 * (t(i) + t(j)));
      out.R(i, i) += c;
      out.R(i, j) = c;
      out.S(pair_index(d, i, j)) = c;
    }
  }
  return out;
}

StrategyMetrics strategy2(const DensityMatrix& tau, double n1,
                          const std::vector<double>& round_weights, Mode mode) {
  std::vector<double> splits{n1};
  splits.insert(splits.end(), round_weights.begin(), round_weights.end());
  StrategyMetrics out = block_measures(strategy2_blocks(tau, n1, round_weights), std::move(splits));
  out.strategy = "strategy2";
  out.mode = mode;
  return out;
}

StrategyMetrics strategy2_uniform(const DensityMatrix& tau, double n, Mode mode) {
  const int d = tau.dim();
  require_even(d);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  return strategy2(tau, 0.0, std::vector<double>(static_cast<std::size_t>(d - 1), n / (d - 1)), mode);
}

double strategy2_tracial_det(int d, double n1, double n_prime) {
  const double dd = d;
  return std::exp((dd * dd - 1.0) * std::log(dd / 4.0) +
                  (dd - 1.0) * (std::log(2.0 * n1 + n_prime * (dd - 2.0)) + dd * std::log(n_prime)));
}

double strategy2_tracial_tr(int d, double n1, double n_prime) {
  const double dd = d;
  return 4.0 * (dd - 1.0) * (1.0 / ((2.0 * n1 + n_prime * (dd - 2.0)) * dd) + 1.0 / n_prime);
}

double strategy2_tracial_optimum(int d, double n, Mode mode) {
  require_even(d);
  const double dd = d;
  if (mode == Mode::Volume) {
    return std::exp((dd * dd - 1.0) * std::log(dd / 4.0) +
                    (dd - 1.0) * (std::log(dd - 2.0) + (dd + 1.0) * std::log(n / (dd - 1.0))));
  }
  return 4.0 * std::pow(dd - 1.0, 4) / (n * (dd - 2.0) * dd);
}

double strategy2_lower_bound(int d, double n) {
  return 4.0 * (d - 1.0) * (d - 1.0) / n;
}

DensityMatrix small_a_state(int d, double a) {
  if (d < 3) throw Error(ErrorCode::InvalidArgument, "family needs d >= 3");
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "a must lie in (0, 1)");
  std::vector<double> p(static_cast<std::size_t>(d), (1.0 - a) / (d - 2));
  p[0] = p[1] = a / 2.0;
  return DensityMatrix::diagonal(p);
}

}  // namespace tomoplan::highdim
