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

#include "doctest.h"
#include "oracles.hpp"
#include "tomoplan/qubit_strategies.hpp"

using namespace tomoplan;
using namespace tomoplan::qubit;

namespace {

Vec3 random_unit(Rng& rng) { return Vec3(rng.normal(), rng.normal(), rng.normal()).normalized(); }

BlochVector random_inside(Rng& rng, double max_radius) {
  return max_radius * std::cbrt(rng.uniform()) * random_unit(rng);
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

QubitConfig xyz(double each) {
  return {{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}, {each, each, each}, 3.0 * each};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("qubit_M examples") {
  const RealMatrix at_center = qubit_matrix(BlochVector::Zero(), xyz(100.0));
  CHECK((at_center - 100.0 * RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  const RealMatrix m = qubit_matrix(BlochVector(0, 0, 0.8), xyz(100.0));
  RealMatrix expected = RealMatrix::Zero(3, 3);
  expected.diagonal() << 100.0, 100.0, 100.0 / 0.36;
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-9);

  const BlochVector u(0, 0, 0.5);
  const QubitConfig cfg{{Vec3::UnitX(), Vec3::UnitZ(), Vec3(1, 1, 1).normalized()}, {30, 30, 40}, 100};
  std::vector<StrategyItem> items;
  for (std::size_t b = 0; b < cfg.axes.size(); ++b) items.push_back({axis_observable(cfg.axes[b]), cfg.weights[b]});
  const KnowledgeOperator general = build_M(bloch_to_density(u), StrategyConfig(items));
  // Hermitian-basis coordinates for d=2 are (z, x, y); permute to (x, y, z).
  Eigen::PermutationMatrix<3> perm;
  perm.indices() << 1, 2, 0;
  const RealMatrix in_xyz = perm.transpose() * general.matrix * perm;
  CHECK((in_xyz - qubit_matrix(u, cfg)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qubit_M agrees with build_M on random configurations") {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const BlochVector u = random_inside(rng, 0.95);
    QubitConfig cfg;
    const int m = 3 + rep % 4;
    std::vector<StrategyItem> items;
    for (int b = 0; b < m; ++b) {
      cfg.axes.push_back(random_unit(rng));
      cfg.weights.push_back(1.0 + 10.0 * rng.uniform());
      cfg.total += cfg.weights.back();
      items.push_back({axis_observable(cfg.axes.back()), cfg.weights.back()});
    }
    const KnowledgeOperator bloch = qubit_M(u, cfg);
    CHECK(bloch.coordinates == Coordinates::BlochXYZ);
    const KnowledgeOperator general = build_M(bloch_to_density(u), StrategyConfig(items));
    const KnowledgeReport a = knowledge_report(bloch);
    const KnowledgeReport b = knowledge_report(general);
    CHECK(a.det_M == doctest::Approx(b.det_M).epsilon(1e-10));
    CHECK(a.tr_M_inv == doctest::Approx(b.tr_M_inv).epsilon(1e-10));
  }
}

TEST_CASE("qubit_M errors") {
  const QubitConfig planar{{Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 0).normalized()}, {1, 1, 1}, 3};
  try {
    qubit_M(BlochVector::Zero(), planar);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
  CHECK_THROWS_AS(qubit_M(BlochVector(0, 0, 1.0), xyz(1.0)), Error);
  const QubitConfig not_unit{{Vec3(2, 0, 0), Vec3::UnitY(), Vec3::UnitZ()}, {1, 1, 1}, 3};
  CHECK_THROWS_AS(not_unit.validate(), Error);
  const QubitConfig bad_total{{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}, {1, 1, 1}, 4};
  CHECK_THROWS_AS(bad_total.validate(), Error);
}

TEST_CASE("lemma1 examples") {
  const QubitOptimum center = lemma1_optimum(BlochVector::Zero(), 300.0);
  CHECK(center.value == doctest::Approx(1e6));
  CHECK(knowledge_report(qubit_matrix(BlochVector::Zero(), center.config)).volume == doctest::Approx(1e-3));
  for (double w : center.config.weights) CHECK(w == doctest::Approx(100.0));
  CHECK(center.config.axes[0].isApprox(Vec3::UnitX()));
  CHECK(center.config.axes[2].isApprox(Vec3::UnitZ()));

  const QubitOptimum off = lemma1_optimum(BlochVector(0, 0, 0.8), 300.0);
  CHECK(off.value == doctest::Approx(1e6 / 0.36));
  CHECK(off.eigenvalues(0) == doctest::Approx(100.0));
  CHECK(off.eigenvalues(1) == doctest::Approx(100.0));
  CHECK(off.eigenvalues(2) == doctest::Approx(277.78).epsilon(1e-4));

  double previous = 1.0;
  for (double r : {0.9, 0.99, 0.999, 0.99999}) {
    const QubitOptimum q = lemma1_optimum(BlochVector(r, 0, 0), 300.0);
    const double v = std::pow(q.value, -0.5);
    CHECK(v < previous);
    previous = v;
  }
  CHECK(previous < 1e-5);
  CHECK_THROWS_AS(lemma1_optimum(BlochVector(0, 0, 1.0), 300.0), Error);
}

TEST_CASE("lemma2 examples") {
  const QubitOptimum center = lemma2_optimum(BlochVector::Zero(), 900.0);
  CHECK(center.value == doctest::Approx(0.01));
  for (double w : center.config.weights) CHECK(w == doctest::Approx(300.0));

  const QubitOptimum off = lemma2_optimum(BlochVector(0, 0, 0.6), 280.0);
  CHECK(off.config.weights[0] == doctest::Approx(100.0));
  CHECK(off.config.weights[1] == doctest::Approx(100.0));
  CHECK(off.config.weights[2] == doctest::Approx(80.0));
  CHECK(off.value == doctest::Approx(0.028));
  CHECK(off.eigenvalues(0) == doctest::Approx(100.0));
  CHECK(off.eigenvalues(2) == doctest::Approx(280.0 / (2.8 * 0.8)));
  CHECK(config_value(BlochVector(0, 0, 0.6), off.config, Mode::Distance) == doctest::Approx(0.028));

  const QubitOptimum edge = lemma2_optimum(BlochVector(0, 0, 1.0 - 1e-12), 100.0);
  CHECK(edge.value == doctest::Approx(0.04).epsilon(1e-4));
  CHECK_THROWS_AS(lemma2_optimum(BlochVector(0, 0, 1.2), 100.0), Error);
}

TEST_CASE("lemma configurations have proportional transverse blocks") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const BlochVector u = random_inside(rng, 0.95);
    const double n = 100.0 + 1000.0 * rng.uniform();
    for (Mode mode : {Mode::Volume, Mode::Distance}) {
      const QubitOptimum q = lemma_optimum(u, n, mode);
      const RealMatrix m = qubit_matrix(u, q.config);
      const auto frame = frame_along(u);
      Eigen::Matrix<double, 3, 2> t;
      t.col(0) = frame[0];
      t.col(1) = frame[1];
      const Eigen::Matrix2d block = t.transpose() * m * t;
      const double scale = block.trace() / 2.0;
      CHECK((block - scale * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10 * scale);
      if (u.norm() > 1e-12) {
        const Vec3 along = m * u.normalized();
        CHECK((along - along.dot(u.normalized()) * u.normalized()).norm() < 1e-10 * along.norm());
      }
      CHECK(stationarity_residual(u, q.config, mode) < 1e-8);
    }
  }
}

TEST_CASE("frame_along and minimal_rotation") {
  Rng rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec3 a = random_unit(rng);
    const Vec3 b = random_unit(rng);
    const Eigen::Matrix3d r = minimal_rotation(a, b);
    CHECK((r * a - b).norm() < 1e-12);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0));
    const Vec3 normal = a.cross(b).normalized();
    CHECK((r * normal - normal).norm() < 1e-10);
  }
  const Eigen::Matrix3d flip = minimal_rotation(Vec3::UnitZ(), -Vec3::UnitZ());
  CHECK((flip * Vec3::UnitZ() + Vec3::UnitZ()).norm() < 1e-12);
  CHECK(flip.determinant() == doctest::Approx(1.0));

  const auto identity = frame_along(BlochVector::Zero());
  CHECK(identity[0] == Vec3::UnitX());
  CHECK(identity[2] == Vec3::UnitZ());
  const auto f = frame_along(BlochVector(0.1, -0.3, 0.2));
  CHECK((f[2] - BlochVector(0.1, -0.3, 0.2).normalized()).norm() < 1e-12);
  CHECK(std::abs(f[0].dot(f[1])) < 1e-12);
  CHECK(f[0].cross(f[1]).dot(f[2]) == doctest::Approx(1.0));
}

TEST_CASE("rotation covariance") {
  Rng rng(44);
  for (int rep = 0; rep < 30; ++rep) {
    const BlochVector u = random_inside(rng, 0.9);
    QubitConfig cfg;
    for (int b = 0; b < 4; ++b) {
      cfg.axes.push_back(random_unit(rng));
      cfg.weights.push_back(1.0 + rng.uniform());
      cfg.total += cfg.weights.back();
    }
    const Eigen::Matrix3d r = random_rotation(rng);
    QubitConfig rotated = cfg;
    for (auto& c : rotated.axes) c = r * c;
    for (Mode mode : {Mode::Volume, Mode::Distance}) {
      const double a = config_value(u, cfg, mode);
      const double b = config_value(r * u, rotated, mode);
      CHECK(rel(b, a) < 1e-10);
    }
  }
}

TEST_CASE("numerical optimizer examples") {
  OptimizerOptions opts;
  opts.seed = 7;
  const NumericOptimum v = optimize_config_numeric(BlochVector::Zero(), 300.0, 3, Mode::Volume, opts);
  CHECK(rel(v.value, 1e6) < 1e-6);
  CHECK(v.restart_values.size() == 32);

  const NumericOptimum d = optimize_config_numeric(BlochVector(0, 0, 0.6), 280.0, 3, Mode::Distance, opts);
  CHECK(rel(d.value, 0.028) < 1e-6);

  const BlochVector u(0.3, 0.2, 0.5);
  const NumericOptimum five = optimize_config_numeric(u, 600.0, 5, Mode::Volume, opts);
  const double closed = lemma1_optimum(u, 600.0).value;
  CHECK(five.value <= closed * (1.0 + 1e-6));
  CHECK(rel(five.value, closed) < 1e-4);
  double sum = 0.0;
  for (double w : five.config.weights) sum += w;
  CHECK(sum == doctest::Approx(600.0));
  for (const auto& c : five.config.axes) CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(optimize_config_numeric(u, 600.0, 2, Mode::Volume, opts), Error);
}

TEST_CASE("numerical optimizer never beats the lemmas") {
  Rng rng(45);
  OptimizerOptions opts;
  for (int rep = 0; rep < 20; ++rep) {
    const BlochVector u = random_inside(rng, 0.95);
    const double n = 50.0 + 1000.0 * rng.uniform();
    opts.seed = rng.next();
    const NumericOptimum vol = optimize_config_numeric(u, n, 3, Mode::Volume, opts);
    const double best_vol = lemma1_optimum(u, n).value;
    CHECK(vol.value <= best_vol * (1.0 + 1e-6));
    CHECK(rel(vol.value, best_vol) < 1e-4);
    const NumericOptimum dis = optimize_config_numeric(u, n, 3, Mode::Distance, opts);
    const double best_dis = lemma2_optimum(u, n).value;
    CHECK(dis.value >= best_dis * (1.0 - 1e-6));
    CHECK(rel(dis.value, best_dis) < 1e-4);
  }
}

TEST_CASE("optimizer is deterministic for a seed") {
  OptimizerOptions opts;
  opts.seed = 99;
  opts.restarts = 4;
  const BlochVector u(0.1, 0.2, 0.3);
  const NumericOptimum a = optimize_config_numeric(u, 100.0, 4, Mode::Distance, opts);
  const NumericOptimum b = optimize_config_numeric(u, 100.0, 4, Mode::Distance, opts);
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
  CHECK(a.restart_values == b.restart_values);
}
