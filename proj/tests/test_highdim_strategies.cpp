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

#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tomoplan/highdim_strategies.hpp"
#include "tomoplan/qubit_strategies.hpp"

using namespace tomoplan;
using namespace tomoplan::highdim;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

StrategyMetrics dense_metrics(const KnowledgeOperator& m) {
  const KnowledgeReport r = knowledge_report(m);
  StrategyMetrics out;
  out.det_M = r.det_M;
  out.log_det_M = r.log_det_M;
  out.tr_M_inv = r.tr_M_inv;
  return out;
}

DensityMatrix diag_state(std::vector<double> p) { return DensityMatrix::diagonal(p); }

}  // namespace

TEST_CASE("twirl keeps block form operators unchanged") {
  Rng rng(51);
  const auto tau = diag_state({0.5, 0.3, 0.2});
  const TwirledOperator t = twirl(build_M(tau, oracle::random_strategy(3, 4, 10.0, rng)), tau);
  const KnowledgeOperator once = twirled_operator(t);
  const TwirledOperator again = twirl(once, tau);
  CHECK((again.R - t.R).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((again.S - t.S).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("twirl errors") {
  const auto tau = diag_state({0.5, 0.3, 0.2});
  Rng rng(52);
  BuildOptions plain;
  plain.with_components = false;
  try {
    twirl(build_M(tau, oracle::random_strategy(3, 4, 1.0, rng), plain), tau);
    FAIL("expected MissingComponents");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingComponents);
  }
}

TEST_CASE("twirl monotonicity on random strategies") {
  Rng rng(53);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 3 + rep % 2;
    const DensityMatrix tau = d == 3 && rep < 10 ? diag_state({0.5, 0.3, 0.2}) : oracle::random_density(d, rng, 0.3);
    const KnowledgeOperator m = build_M(tau, oracle::random_strategy(d, d + 1, 10.0, rng));
    const KnowledgeReport before = knowledge_report(m);
    const StrategyMetrics after = block_measures(twirl(m, tau));
    CHECK(after.log_det_M >= before.log_det_M - 1e-9);
    CHECK(after.tr_M_inv <= before.tr_M_inv * (1.0 + 1e-9));
  }
}

TEST_CASE("mask twirl equals the phase integral") {
  Rng rng(54);
  const auto tau = diag_state({0.5, 0.3, 0.2});
  const StrategyConfig s = oracle::random_strategy(3, 4, 10.0, rng);
  const KnowledgeOperator m = build_M(tau, s);
  const ComplexMatrix masked = twirled_table(twirl(m, tau));
  const ComplexMatrix integrated =
      oracle::twirl_by_integration(tau, s, m.eigenbasis, {0.0, 1.0, 3.0}, 64);
  CHECK((masked - integrated).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Sidon spectrum and twirl copies") {
  CHECK(sidon_spectrum(4) == std::vector<int>{0, 1, 3, 7});
  for (int d = 2; d <= 8; ++d) {
    const auto xi = sidon_spectrum(d);
    std::set<int> sums;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) sums.insert(xi[static_cast<std::size_t>(a)] + xi[static_cast<std::size_t>(b)]);
    CHECK(sums.size() == static_cast<std::size_t>(d * (d + 1) / 2));
  }
  Rng rng(55);
  for (int d : {3, 4}) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    const ComplexMatrix basis = strategy_eigenbasis(tau);
    const ObservableSpec b = oracle::random_observable(d, rng);
    BuildOptions opts;
    opts.eigenbasis = basis;
    const TwirledOperator target = twirl(build_M(tau, StrategyConfig({{b, 12.0}}), opts), tau);
    const KnowledgeOperator copies = build_M(tau, StrategyConfig(twirl_copies(b, basis, 12.0)), opts);
    REQUIRE(copies.component_table.has_value());
    CHECK((*copies.component_table - twirled_table(target)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("block formulas agree with the dense computation") {
  Rng rng(56);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + rep % 5;
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    const TwirledOperator t = twirl(build_M(tau, oracle::random_strategy(d, d + 1, 10.0, rng)), tau);
    const StrategyMetrics block = block_measures(t);
    const StrategyMetrics dense = dense_metrics(twirled_operator(t));
    CHECK(std::abs(block.log_det_M - dense.log_det_M) < 1e-9 * std::max(1.0, std::abs(dense.log_det_M)));
    CHECK(rel(block.tr_M_inv, dense.tr_M_inv) < 1e-9);
  }
}

TEST_CASE("cofactor sum equals det R Tr(R^-1 E)") {
  Rng rng(57);
  for (int d = 2; d <= 6; ++d) {
    const ComplexMatrix g = oracle::random_ginibre(d, rng);
    const RealMatrix r = (g * g.adjoint()).real() + RealMatrix::Identity(d, d);
    const double expected = r.determinant() * r.inverse().sum();
    CHECK(rel(cofactor_sum(r), expected) < 1e-9);
  }
}

TEST_CASE("block measures are invariant under R -> R + cE") {
  Rng rng(58);
  for (int d : {3, 4, 5}) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    TwirledOperator t = twirl(build_M(tau, oracle::random_strategy(d, d + 1, 10.0, rng)), tau);
    const StrategyMetrics a = block_measures(t);
    t.R.array() += 7.3;
    const StrategyMetrics b = block_measures(t);
    CHECK(std::abs(a.log_det_M - b.log_det_M) < 1e-9 * std::abs(a.log_det_M));
    CHECK(rel(b.tr_M_inv, a.tr_M_inv) < 1e-9);
  }
}

TEST_CASE("singular R is shifted, hopeless R throws") {
  TwirledOperator t;
  t.dim = 2;
  t.R = RealMatrix::Ones(2, 2);
  t.R(0, 0) = 2.0;
  t.R(1, 1) = 2.0;
  t.R(0, 1) = t.R(1, 0) = -2.0 + 2.0;
  t.S = RealVector::Constant(2, 3.0);
  // R = 2 I: the E direction is fine, nothing to shift.
  const StrategyMetrics ok = block_measures(t);
  CHECK(ok.det_M > 0.0);

  // R = -E + I is singular along E only; the shift repairs it.
  t.R = RealMatrix::Identity(2, 2) - 0.5 * RealMatrix::Ones(2, 2);
  t.R(0, 0) += 0.0;
  CHECK_NOTHROW(block_measures(t));

  t.R = RealMatrix::Zero(2, 2);
  try {
    block_measures(t);
    FAIL("expected SingularR");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularR);
  }
}

TEST_CASE("unbiased partner overlaps") {
  const ObservableSpec h = unbiased_partner(diag_state({0.8, 0.2}));
  for (const auto& o : h.outcomes()) {
    CHECK(o.projector(0, 0).real() == doctest::Approx(0.5));
    CHECK(std::abs(std::abs(o.projector(0, 1)) - 0.5) < 1e-12);
  }
  Rng rng(59);
  for (int d : {3, 5, 7}) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    const ComplexMatrix e = strategy_eigenbasis(tau);
    const ObservableSpec f = unbiased_partner(tau);
    CHECK(f.size() == static_cast<std::size_t>(d));
    for (const auto& o : f.outcomes()) {
      for (int i = 0; i < d; ++i) {
        const double overlap = (e.col(i).adjoint() * o.projector * e.col(i))(0, 0).real();
        CHECK(std::abs(overlap - 1.0 / d) < 1e-10);
      }
    }
  }
  const std::vector<double> edge{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(unbiased_partner(DensityMatrix::diagonal(edge)), Error);
}

TEST_CASE("strategy 1 closed forms") {
  Rng rng(60);
  for (int d = 2; d <= 6; ++d) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.4);
    for (Mode mode : {Mode::Volume, Mode::Distance}) {
      const StrategyMetrics built = strategy1(tau, 1000.0, mode);
      const double closed = strategy1_closed_form(tau, 1000.0, mode);
      if (mode == Mode::Volume) {
        CHECK(std::abs(built.log_det_M - std::log(closed)) < 1e-9 * std::abs(std::log(closed)));
      } else {
        CHECK(rel(built.tr_M_inv, closed) < 1e-9);
      }
    }
  }
  const auto tracial = DensityMatrix::maximally_mixed(4);
  CHECK(strategy1(tracial, 1.0, Mode::Distance).tr_M_inv == doctest::Approx(37.5).epsilon(1e-9));

  const Strategy1Split v = strategy1_split(tracial, 500.0, Mode::Volume);
  CHECK(v.n1 == doctest::Approx(100.0));
  CHECK(v.n2 == doctest::Approx(400.0));
}

TEST_CASE("strategy 1 reduces to the qubit lemmas") {
  Rng rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    const BlochVector u = 0.9 * std::cbrt(rng.uniform()) *
                          Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const DensityMatrix tau = bloch_to_density(u);
    const double n = 300.0;
    CHECK(rel(strategy1_closed_form(tau, n, Mode::Volume), qubit::lemma1_optimum(u, n).value) < 1e-12);
    CHECK(rel(strategy1_closed_form(tau, n, Mode::Distance), qubit::lemma2_optimum(u, n).value) < 1e-12);
    CHECK(rel(strategy1(tau, n, Mode::Volume).det_M, qubit::lemma1_optimum(u, n).value) < 1e-9);
    CHECK(rel(strategy1(tau, n, Mode::Distance).tr_M_inv, qubit::lemma2_optimum(u, n).value) < 1e-9);
  }
}

TEST_CASE("strategy 1 realization has the twirled M") {
  Rng rng(62);
  for (int d : {2, 3, 4}) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    const Strategy1Split split = strategy1_split(tau, 600.0, Mode::Distance);
    const StrategyMetrics built = strategy1(tau, 600.0, Mode::Distance);
    const KnowledgeOperator real = build_M(tau, strategy1_realization(tau, split.n1, split.n2));
    const KnowledgeReport r = knowledge_report(real);
    CHECK(rel(r.tr_M_inv, built.tr_M_inv) < 1e-9);
    CHECK(std::abs(r.log_det_M - built.log_det_M) < 1e-8);
  }
}

TEST_CASE("round robin schedules") {
  const PairSchedule two = round_robin(2);
  REQUIRE(two.rounds.size() == 1);
  CHECK(two.rounds[0] == std::vector<std::pair<int, int>>{{1, 2}});
  for (int d = 2; d <= 20; d += 2) {
    const PairSchedule s = round_robin(d);
    CHECK(s.rounds.size() == static_cast<std::size_t>(d - 1));
    CHECK(covers_all_pairs(s));
    std::set<std::pair<int, int>> seen;
    for (const auto& round : s.rounds) {
      CHECK(round.size() == static_cast<std::size_t>(d / 2));
      std::set<int> used;
      for (auto [a, b] : round) {
        CHECK(a < b);
        used.insert(a);
        used.insert(b);
        CHECK(seen.insert({a, b}).second);
      }
      CHECK(used.size() == static_cast<std::size_t>(d));
    }
    CHECK(seen.size() == static_cast<std::size_t>(d * (d - 1) / 2));
  }
  PairSchedule broken = round_robin(4);
  broken.rounds[1] = broken.rounds[0];
  CHECK_FALSE(covers_all_pairs(broken));
  try {
    round_robin(5);
    FAIL("expected OddDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddDimension);
  }
}

TEST_CASE("strategy 2 blocks match build_M and twirl") {
  Rng rng(63);
  for (int d : {2, 4, 6}) {
    const DensityMatrix tau = oracle::random_density(d, rng, 0.3);
    std::vector<double> weights;
    for (int r = 0; r < d - 1; ++r) weights.push_back(10.0 + 10.0 * rng.uniform());
    const double n1 = 5.0;
    const TwirledOperator blocks = strategy2_blocks(tau, n1, weights);
    BuildOptions opts;
    opts.eigenbasis = blocks.eigenbasis;
    const KnowledgeOperator m = build_M(tau, strategy2_config(tau, n1, weights), opts);
    const TwirledOperator masked = twirl(m, tau);
    CHECK((masked.R - blocks.R).cwiseAbs().maxCoeff() < 1e-9 * blocks.R.cwiseAbs().maxCoeff());
    CHECK((masked.S - blocks.S).cwiseAbs().maxCoeff() < 1e-9 * blocks.S.cwiseAbs().maxCoeff());

    const StrategyMetrics block = strategy2(tau, n1, weights, Mode::Distance);
    const StrategyMetrics dense = dense_metrics(twirled_operator(blocks));
    CHECK(rel(block.tr_M_inv, dense.tr_M_inv) < 1e-9);
    CHECK(std::abs(block.log_det_M - dense.log_det_M) < 1e-9 * std::abs(dense.log_det_M));
  }
}

TEST_CASE("strategy 2 tracial closed forms") {
  for (int d : {4, 6, 8}) {
    const auto tracial = DensityMatrix::maximally_mixed(d);
    for (double n1 : {0.0, 20.0}) {
      const double np = 30.0;
      const std::vector<double> weights(static_cast<std::size_t>(d - 1), np);
      const StrategyMetrics m = strategy2(tracial, n1, weights, Mode::Volume);
      CHECK(rel(m.det_M, strategy2_tracial_det(d, n1, np)) < 1e-9);
      CHECK(rel(m.tr_M_inv, strategy2_tracial_tr(d, n1, np)) < 1e-9);
    }
  }
  CHECK(strategy2_uniform(DensityMatrix::maximally_mixed(4), 1.0, Mode::Distance).tr_M_inv ==
        doctest::Approx(40.5).epsilon(1e-9));
  CHECK(strategy2_tracial_optimum(4, 1.0, Mode::Distance) == doctest::Approx(40.5));
  try {
    strategy2_uniform(DensityMatrix::maximally_mixed(3), 1.0, Mode::Volume);
    FAIL("expected OddDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddDimension);
  }
}

TEST_CASE("strategy comparisons at the tracial state") {
  for (int d : {4, 6}) {
    const auto tracial = DensityMatrix::maximally_mixed(d);
    CHECK(strategy1(tracial, 100.0, Mode::Volume).log_det_M >=
          strategy2_uniform(tracial, 100.0, Mode::Volume).log_det_M);
    CHECK(strategy1(tracial, 100.0, Mode::Distance).tr_M_inv <=
          strategy2_uniform(tracial, 100.0, Mode::Distance).tr_M_inv);
  }
  // Any admissible round weights stay above the lower bound.
  Rng rng(64);
  const auto six = DensityMatrix::maximally_mixed(6);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w;
    double total = 0.0;
    const double n1 = rep % 2 == 0 ? 0.0 : rng.uniform();
    for (int r = 0; r < 5; ++r) {
      w.push_back(0.1 + rng.uniform());
      total += w.back();
    }
    for (double& x : w) x *= (1.0 - n1) / total;
    CHECK(strategy2(six, n1, w, Mode::Distance).tr_M_inv >= strategy2_lower_bound(6, 1.0) * (1.0 - 1e-9));
  }
  CHECK(strategy2_lower_bound(6, 1.0) == doctest::Approx(100.0));
}

TEST_CASE("small-a states favour strategy 2") {
  // Every observable, B1 included, gets n / d. With n1 = 0 the (1,2) block of R
  // has rank one and det grows only as a^-3.
  const double n = 1000.0;
  const std::vector<double> rounds(3, n / 4.0);
  auto log_det = [&](double a) { return strategy2(small_a_state(4, a), n / 4.0, rounds).log_det_M; };
  CHECK(std::exp(log_det(5e-6) - log_det(1e-5)) == doctest::Approx(16.0).epsilon(1e-3));
  const double uniform_ratio = std::exp(strategy2_uniform(small_a_state(4, 5e-6), n, Mode::Volume).log_det_M -
                                        strategy2_uniform(small_a_state(4, 1e-5), n, Mode::Volume).log_det_M);
  CHECK(uniform_ratio == doctest::Approx(8.0).epsilon(1e-3));
  // Strategy 1 diverges only as a^-2.
  CHECK(std::exp(strategy1(small_a_state(4, 5e-6), n, Mode::Volume).log_det_M -
                 strategy1(small_a_state(4, 1e-5), n, Mode::Volume).log_det_M) ==
        doctest::Approx(4.0).epsilon(1e-3));
  for (double a : {1e-3, 1e-4, 1e-6}) {
    CHECK(log_det(a) > strategy1(small_a_state(4, a), n, Mode::Volume).log_det_M);
  }
  const DensityMatrix s = small_a_state(4, 0.2);
  CHECK(s.matrix()(0, 0).real() == doctest::Approx(0.1));
  CHECK(s.matrix()(3, 3).real() == doctest::Approx(0.4));
}
