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

#include "tomoplan/qubit_strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tomoplan/rng.hpp"

namespace tomoplan::qubit {

namespace {

void require_inside(const BlochVector& u) {
  if (!u.allFinite() || u.norm() >= 1.0) {
    throw Error(ErrorCode::OutOfBall, "|u| must be < 1");
  }
}

double gain(const BlochVector& u, const Vec3& c) {
  const double uc = u.dot(c);
  return 1.0 / (1.0 - uc * uc);
}

// Euclidean projection onto {p >= 0, sum p = 1}.
void project_simplex(std::vector<double>& p) {
  std::vector<double> s = p;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cumulative += s[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  for (auto& x : p) x = std::max(x - theta, 0.0);
}

struct Objective {
  double value;                 // ln det M  or  -Tr(M^-1); -inf if singular
  std::vector<double> grad_w;
  std::vector<Vec3> grad_c;
};

Objective evaluate(const BlochVector& u, const std::vector<Vec3>& axes,
                   const std::vector<double>& w, Mode mode, bool with_gradient) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t b = 0; b < axes.size(); ++b) {
    m += w[b] * gain(u, axes[b]) * axes[b] * axes[b].transpose();
  }
  Objective out{-std::numeric_limits<double>::infinity(), {}, {}};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  const Vec3 ev = es.eigenvalues();
  if (!(ev(0) > 1e-14 * std::max(ev(2), 1e-300))) return out;
  const Eigen::Matrix3d v = es.eigenvectors();
  Eigen::Matrix3d k;
  if (mode == Mode::Volume) {
    out.value = ev.array().log().sum();
    k = v * ev.cwiseInverse().asDiagonal() * v.transpose();
  } else {
    out.value = -ev.cwiseInverse().sum();
    k = v * ev.array().square().inverse().matrix().asDiagonal() * v.transpose();
  }
  if (!with_gradient) return out;
  out.grad_w.resize(axes.size());
  out.grad_c.resize(axes.size());
  for (std::size_t b = 0; b < axes.size(); ++b) {
    const Vec3& c = axes[b];
    const double g = gain(u, c);
    const Vec3 kc = k * c;
    const double ckc = c.dot(kc);
    out.grad_w[b] = g * ckc;
    out.grad_c[b] = w[b] * (2.0 * g * kc + 2.0 * g * g * u.dot(c) * ckc * u);
  }
  return out;
}

Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-8);
  return v.normalized();
}

}  // namespace

void QubitConfig::validate() const {
  if (axes.empty() || axes.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "one weight per axis required");
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < axes.size(); ++b) {
    if (std::abs(axes[b].norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "axes must be unit vectors");
    }
    if (!(weights[b] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative weight");
    sum += weights[b];
  }
  if (std::abs(sum - total) > 1e-9 * std::max(1.0, total)) {
    throw Error(ErrorCode::InvalidArgument, "weights do not sum to the total");
  }
}

RealMatrix qubit_matrix(const BlochVector& u, const QubitConfig& config) {
  require_inside(u);
  config.validate();
  Eigen::MatrixXd spanning(3, 0);
  RealMatrix m = RealMatrix::Zero(3, 3);
  for (std::size_t b = 0; b < config.axes.size(); ++b) {
    if (config.weights[b] <= 0.0) continue;
    const Vec3& c = config.axes[b];
    m += config.weights[b] * gain(u, c) * c * c.transpose();
    spanning.conservativeResize(3, spanning.cols() + 1);
    spanning.col(spanning.cols() - 1) = c;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(spanning);
  const auto sv = svd.singularValues();
  if (sv.size() < 3 || sv(2) < 1e-10 * sv(0)) {
    throw Error(ErrorCode::RankDeficient, "measurement axes span fewer than 3 directions");
  }
  return m;
}

KnowledgeOperator qubit_M(const BlochVector& u, const QubitConfig& config) {
  KnowledgeOperator out;
  out.dim = 2;
  out.coordinates = Coordinates::BlochXYZ;
  out.matrix = qubit_matrix(u, config);
  return out;
}

Eigen::Matrix3d minimal_rotation(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double c = a.dot(b);
  if (c < -1.0 + 1e-15) {
    // Antiparallel: half turn about an axis orthogonal to `a`.
    Vec3 e = Vec3::UnitX();
    if (std::abs(a.x()) > 0.9) e = Vec3::UnitY();
    const Vec3 axis = a.cross(e).normalized();
    return 2.0 * axis * axis.transpose() - Eigen::Matrix3d::Identity();
  }
  const Vec3 k = a.cross(b);
  Eigen::Matrix3d kx;
  kx << 0.0, -k.z(), k.y(), k.z(), 0.0, -k.x(), -k.y(), k.x(), 0.0;
  return Eigen::Matrix3d::Identity() + kx + kx * kx / (1.0 + c);
}

std::array<Vec3, 3> frame_along(const BlochVector& u) {
  const double len = u.norm();
  if (len < 1e-15) return {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  const Eigen::Matrix3d r = minimal_rotation(Vec3::UnitZ(), u / len);
  return {(r * Vec3::UnitX()).normalized(), (r * Vec3::UnitY()).normalized(), u / len};
}

QubitOptimum lemma1_optimum(const BlochVector& u, double n) {
  require_inside(u);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const double one_minus = 1.0 - u.squaredNorm();
  const auto frame = frame_along(u);
  QubitOptimum out;
  out.mode = Mode::Volume;
  out.config.axes.assign(frame.begin(), frame.end());
  out.config.weights = {n / 3.0, n / 3.0, n / 3.0};
  out.config.total = n;
  out.value = std::pow(n / 3.0, 3) / one_minus;
  out.eigenvalues = Vec3(n / 3.0, n / 3.0, n / (3.0 * one_minus));
  return out;
}

QubitOptimum lemma2_optimum(const BlochVector& u, double n) {
  require_inside(u);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const double s = std::sqrt(1.0 - u.squaredNorm());
  const auto frame = frame_along(u);
  QubitOptimum out;
  out.mode = Mode::Distance;
  out.config.axes.assign(frame.begin(), frame.end());
  out.config.weights = {n / (2.0 + s), n / (2.0 + s), n * s / (2.0 + s)};
  out.config.total = n;
  out.value = (2.0 + s) * (2.0 + s) / n;
  out.eigenvalues = Vec3(n / (2.0 + s), n / (2.0 + s), n / ((2.0 + s) * s));
  return out;
}

QubitOptimum lemma_optimum(const BlochVector& u, double n, Mode mode) {
  return mode == Mode::Volume ? lemma1_optimum(u, n) : lemma2_optimum(u, n);
}

double config_value(const BlochVector& u, const QubitConfig& config, Mode mode) {
  const KnowledgeReport r = knowledge_report(qubit_matrix(u, config));
  return mode == Mode::Volume ? r.det_M : r.tr_M_inv;
}

double stationarity_residual(const BlochVector& u, const QubitConfig& config, Mode mode) {
  const RealMatrix m = qubit_matrix(u, config);
  const Eigen::Matrix3d minv = Eigen::Matrix3d(m).inverse();
  const double n = config.total;
  const Eigen::Matrix3d k = mode == Mode::Volume ? minv : Eigen::Matrix3d(minv * minv);
  const double c = mode == Mode::Volume ? 3.0 / n : minv.trace() / n;
  double worst = 0.0;
  for (std::size_t b = 0; b < config.axes.size(); ++b) {
    const double nb = config.weights[b];
    if (nb <= 0.0) continue;
    const Vec3& cb = config.axes[b];
    const double g = gain(u, cb);
    const double ckc = cb.dot(k * cb);
    worst = std::max(worst, std::abs(g * ckc - c) / c);
    const double big_c = 2.0 * nb * c * g;
    const Vec3 lhs = 2.0 * nb * g * (k * cb) + 2.0 * nb * g * g * u.dot(cb) * ckc * u;
    worst = std::max(worst, (lhs - big_c * cb).norm() / big_c);
  }
  return worst;
}

NumericOptimum optimize_config_numeric(const BlochVector& u, double n, int m, Mode mode,
                                       const OptimizerOptions& options) {
  require_inside(u);
  if (m < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 axes");
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const auto mm = static_cast<std::size_t>(m);

  NumericOptimum best;
  bool have_best = false;
  double best_objective = -std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < options.restarts; ++restart) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(restart)));
    std::vector<Vec3> axes(mm);
    std::vector<double> w(mm);
    double wsum = 0.0;
    for (std::size_t b = 0; b < mm; ++b) {
      axes[b] = random_unit(rng);
      w[b] = rng.exponential();
      wsum += w[b];
    }
    for (auto& x : w) x /= wsum;

    Objective cur = evaluate(u, axes, w, mode, true);
    double step = 0.1;
    for (int it = 0; it < options.iterations && std::isfinite(cur.value); ++it) {
      std::vector<Vec3> trial_axes(mm);
      std::vector<double> trial_w(mm);
      for (std::size_t b = 0; b < mm; ++b) {
        const Vec3& c = axes[b];
        const Vec3 tangent = cur.grad_c[b] - cur.grad_c[b].dot(c) * c;
        trial_axes[b] = (c + step * tangent).normalized();
        trial_w[b] = w[b] + step * cur.grad_w[b];
      }
      project_simplex(trial_w);
      Objective next = evaluate(u, trial_axes, trial_w, mode, true);
      if (next.value > cur.value) {
        axes = std::move(trial_axes);
        w = std::move(trial_w);
        cur = std::move(next);
        step *= 1.5;
      } else {
        step *= 0.5;
        if (step < 1e-14) break;
      }
    }

    QubitConfig cfg;
    cfg.axes = axes;
    cfg.total = n;
    for (double x : w) cfg.weights.push_back(x * n);
    double value = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(cur.value)) {
      value = mode == Mode::Volume ? std::exp(cur.value) * n * n * n : -cur.value / n;
    }
    best.restart_values.push_back(value);
    if (std::isfinite(cur.value) && (!have_best || cur.value > best_objective)) {
      have_best = true;
      best_objective = cur.value;
      best.config = std::move(cfg);
      best.value = value;
      best.best_restart = restart;
    }
  }
  if (!have_best) throw Error(ErrorCode::NoConvergence, "no restart reached a finite objective");
  return best;
}

}  // namespace tomoplan::qubit
