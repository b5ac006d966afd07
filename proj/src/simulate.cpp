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

#include "tomoplan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tomoplan::sim {

namespace {

std::size_t draw(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative_of(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

// Euclidean projection of v onto {x >= 0, sum x = total}.
RealVector project_simplex(const RealVector& v, double total) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cumulative += s[k];
    const double t = (cumulative - total) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

// One row per measured projector: w = t + v.x / 2 in HS coordinates.
struct Term {
  RealVector v;
  double t;
  double count;
};

struct Data {
  std::vector<Term> terms;
  /// Linear inversion system rows (weighted).
  RealMatrix a;
  RealVector b;
  bool complete = false;
};

Data collect(const MeasurementRecord& record, int d) {
  Data data;
  const auto counts = record.counts();
  const int params = d * d - 1;
  std::vector<RealVector> rows;
  std::vector<double> rhs;
  std::vector<RealVector> spanning;
  for (std::size_t k = 0; k < record.observable_count(); ++k) {
    const ObservableSpec& spec = record.observable(k);
    if (spec.dim() != d) throw Error(ErrorCode::DimMismatch, "record observable has wrong dim");
    const double total = std::accumulate(counts[k].begin(), counts[k].end(), 0.0,
                                         [](double acc, std::size_t c) { return acc + c; });
    if (total <= 0.0) continue;
    const double sqrt_total = std::sqrt(total);
    for (std::size_t a = 0; a < spec.size(); ++a) {
      const RealVector v = hs_coordinates(spec[a].projector);
      const double t = spec[a].projector.trace().real() / d;
      spanning.push_back(v);
      rows.push_back(0.5 * sqrt_total * v);
      rhs.push_back(sqrt_total * (static_cast<double>(counts[k][a]) / total - t));
      if (counts[k][a] > 0) data.terms.push_back({v, t, static_cast<double>(counts[k][a])});
    }
  }
  data.a = RealMatrix(static_cast<Eigen::Index>(rows.size()), params);
  data.b = RealVector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    data.b(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  if (!rows.empty()) {
    Eigen::ColPivHouseholderQR<RealMatrix> qr(data.a);
    qr.setThreshold(1e-10);
    data.complete = qr.rank() == params;
  }
  return data;
}

double log_likelihood(const Data& data, const RealVector& x) {
  double sum = 0.0;
  for (const auto& term : data.terms) {
    const double w = term.t + 0.5 * term.v.dot(x);
    if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += term.count * std::log(w);
  }
  return sum;
}

RealVector gradient(const Data& data, const RealVector& x) {
  RealVector g = RealVector::Zero(x.size());
  for (const auto& term : data.terms) {
    g += (term.count / (2.0 * (term.t + 0.5 * term.v.dot(x)))) * term.v;
  }
  return g;
}

RealVector project_coordinates(const RealVector& x, int d, double floor) {
  const ComplexMatrix rho =
      ComplexMatrix::Identity(d, d) / static_cast<double>(d) + from_hs_coordinates(x, d);
  return hs_coordinates(project_to_states(rho, floor));
}

double bloch_error(const DensityMatrix& est, const DensityMatrix& truth) {
  return (density_to_bloch(est) - density_to_bloch(truth)).squaredNorm();
}

}  // namespace

std::vector<std::size_t> sample_indices(const DensityMatrix& tau, const ObservableSpec& a,
                                        std::size_t count, Rng& rng) {
  if (tau.dim() != a.dim()) throw Error(ErrorCode::DimMismatch, "state and observable dims differ");
  std::vector<double> p;
  for (const auto& op : outcome_probs(tau, a)) p.push_back(op.probability);
  const auto cumulative = cumulative_of(p);
  std::vector<std::size_t> out(count);
  for (auto& k : out) k = draw(cumulative, rng);
  return out;
}

std::vector<double> sample_outcomes(const DensityMatrix& tau, const ObservableSpec& a,
                                    std::size_t count, Rng& rng) {
  std::vector<double> labels;
  labels.reserve(count);
  for (std::size_t k : sample_indices(tau, a, count, rng)) labels.push_back(a[k].label);
  return labels;
}

ComplexMatrix project_to_states(const ComplexMatrix& h, double floor) {
  const auto d = h.rows();
  if (!(floor >= 0.0) || floor * static_cast<double>(d) >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "eigenvalue floor too large for the dimension");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  const RealVector shifted = es.eigenvalues().array() - floor;
  const RealVector lambda =
      project_simplex(shifted, 1.0 - floor * static_cast<double>(d)).array() + floor;
  const ComplexMatrix& v = es.eigenvectors();
  ComplexMatrix rho = v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "weights must have a positive sum");
  }
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative weight");
    const double exact = weights[i] / sum * static_cast<double>(total);
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k % remainders.size()].second];
  return out;
}

MlEstimate ml_estimate_full(const MeasurementRecord& record, int d, const MlOptions& options) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 2");
  const Data data = collect(record, d);
  const int params = d * d - 1;
  RealVector x = RealVector::Zero(params);
  if (data.a.rows() > 0) {
    x = data.a.completeOrthogonalDecomposition().solve(data.b);
  }
  x = project_coordinates(x, d, options.eps_clip);
  double current = log_likelihood(data, x);

  int it = 0;
  bool converged = data.terms.empty();
  double last_gain = 0.0;
  // Gradient step length carried across iterations; it grows while steps keep
  // paying off, so tangential progress along the eps_clip boundary is not
  // throttled by the stiff curvature normal to it.
  double pg_step = 0.0;
  for (; it < options.max_iterations && !converged; ++it) {
    RealVector g = gradient(data, x);
    RealMatrix h = RealMatrix::Zero(params, params);
    for (const auto& term : data.terms) {
      const double w = term.t + 0.5 * term.v.dot(x);
      h.noalias() += (term.count / (4.0 * w * w)) * (term.v * term.v.transpose());
    }
    const double scale = std::max(h.trace() / params, 1e-300);
    h.diagonal().array() += 1e-12 * scale;
    if (pg_step == 0.0) pg_step = 1.0 / scale;

    const double before = current;
    const RealVector newton = h.ldlt().solve(g);
    double t = 1.0;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const RealVector cand = project_coordinates(x + t * newton, d, options.eps_clip);
      const double value = log_likelihood(data, cand);
      if (value > current) {
        x = cand;
        current = value;
        g = gradient(data, x);
        break;
      }
    }

    // Projected gradient: expand while improving, otherwise halve.
    bool improved = false;
    for (int k = 0; k < 60; ++k) {
      const RealVector cand = project_coordinates(x + pg_step * g, d, options.eps_clip);
      const double value = log_likelihood(data, cand);
      if (value > current) {
        x = cand;
        current = value;
        g = gradient(data, x);
        improved = true;
        pg_step *= 2.0;
      } else if (improved) {
        pg_step *= 0.5;
        break;
      } else {
        pg_step *= 0.5;
      }
    }

    last_gain = current - before;
    if (last_gain <= options.tolerance * std::max(1.0, std::abs(current))) converged = true;
  }
  if (!converged && last_gain > 1e-8 * std::max(1.0, std::abs(current))) {
    throw Error(ErrorCode::NoConvergence, "likelihood maximization did not settle");
  }
  const ComplexMatrix rho =
      ComplexMatrix::Identity(d, d) / static_cast<double>(d) + from_hs_coordinates(x, d);
  return MlEstimate{DensityMatrix(rho), current, it, data.complete};
}

DensityMatrix ml_estimate(const MeasurementRecord& record, int d, const MlOptions& options) {
  return ml_estimate_full(record, d, options).state;
}

TrialResult run_adaptive_qubit(const BlochVector& u_true, std::size_t n_total, Mode mode,
                               std::uint64_t seed, const AdaptiveOptions& options) {
  if (!(u_true.norm() < 1.0)) throw Error(ErrorCode::OutOfBall, "|u| must be < 1");
  if (options.batch < 30) throw Error(ErrorCode::InvalidArgument, "batch must be >= 30");
  if (n_total < 10 * options.batch) {
    throw Error(ErrorCode::InvalidArgument, "n_total must be at least 10 batches");
  }
  const DensityMatrix truth = bloch_to_density(u_true);
  Rng rng(seed);
  MeasurementRecord record(seed);
  std::array<Vec3, 3> frame{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  std::vector<Snapshot> trajectory;

  std::size_t used = 0;
  std::size_t batch_index = 0;
  auto measure = [&](const std::vector<std::size_t>& counts) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (counts[j] == 0) continue;
      const ObservableSpec b = axis_observable(frame[j]);
      const std::size_t k = record.add_observable(
          "b" + std::to_string(batch_index) + "c" + std::to_string(j + 1), b);
      for (std::size_t a : sample_indices(truth, b, counts[j], rng)) record.append_outcome(k, a);
      used += counts[j];
    }
    ++batch_index;
  };

  DensityMatrix estimate = DensityMatrix::maximally_mixed(2);
  const auto pilot = largest_remainder({1.0, 1.0, 1.0}, std::min(options.batch, n_total));
  trajectory.push_back({0, estimate, {frame.begin(), frame.end()}, pilot});
  measure(pilot);

  while (used < n_total) {
    estimate = ml_estimate(record, 2, options.ml);
    const BlochVector u_hat = density_to_bloch(estimate);
    if (u_hat.norm() > 1e-12) {
      const Eigen::Matrix3d r = qubit::minimal_rotation(frame[2], u_hat);
      for (auto& c : frame) c = (r * c).normalized();
      frame[2] = u_hat.normalized();
    }
    const auto ratios = qubit::lemma_optimum(u_hat, 1.0, mode).config.weights;
    const auto counts = largest_remainder(ratios, std::min(options.batch, n_total - used));
    trajectory.push_back({used, estimate, {frame.begin(), frame.end()}, counts});
    measure(counts);
  }

  estimate = ml_estimate(record, 2, options.ml);
  TrialResult out{estimate, truth, hs_distance_sq(estimate.matrix(), truth.matrix()),
                  bloch_error(estimate, truth), record.size(), seed, std::move(trajectory)};
  return out;
}

TrialResult run_fixed(const DensityMatrix& tau_true, const StrategyConfig& strategy,
                      std::uint64_t seed, const MlOptions& options) {
  const int d = tau_true.dim();
  if (strategy.dim() != d) throw Error(ErrorCode::DimMismatch, "strategy and state dims differ");
  std::vector<double> weights;
  for (const auto& item : strategy.items()) weights.push_back(item.weight);
  const auto counts =
      largest_remainder(weights, static_cast<std::size_t>(std::llround(strategy.total())));
  Rng rng(seed);
  MeasurementRecord record(seed);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) continue;
    const auto& spec = strategy.items()[b].observable;
    const std::size_t k = record.add_observable("b" + std::to_string(b + 1), spec);
    for (std::size_t a : sample_indices(tau_true, spec, counts[b], rng)) record.append_outcome(k, a);
  }
  const DensityMatrix estimate = ml_estimate(record, d, options);
  std::optional<double> bloch;
  if (d == 2) bloch = bloch_error(estimate, tau_true);
  std::vector<Vec3> no_axes;
  std::vector<Snapshot> trajectory{
      {0, DensityMatrix::maximally_mixed(d), no_axes, counts}};
  return TrialResult{estimate, tau_true, hs_distance_sq(estimate.matrix(), tau_true.matrix()),
                     bloch, record.size(), seed, std::move(trajectory)};
}

EnsembleStats aggregate(const std::vector<TrialResult>& trials, ErrorMetric metric,
                        std::string mode) {
  if (trials.empty()) throw Error(ErrorCode::EmptyEnsemble, "no trials to aggregate");
  EnsembleStats s;
  s.trials = trials.size();
  s.n = trials.front().n_used;
  s.mode = std::move(mode);
  std::vector<double> values;
  for (const auto& t : trials) {
    if (t.n_used != s.n) throw Error(ErrorCode::InvalidArgument, "trials use different n");
    if (metric == ErrorMetric::Bloch) {
      if (!t.bloch_squared_error) throw Error(ErrorCode::InvalidArgument, "no Bloch error recorded");
      values.push_back(*t.bloch_squared_error);
    } else {
      values.push_back(t.squared_error);
    }
  }
  const double count = static_cast<double>(values.size());
  s.mean_sq_error = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean_sq_error) * (v - s.mean_sq_error);
    s.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return s;
}

std::vector<TrialResult> run_ensemble(
    std::size_t count, std::uint64_t base_seed, unsigned threads,
    const std::function<TrialResult(std::size_t, std::uint64_t)>& trial) {
  return parallel_map<TrialResult>(
      count, threads, [&](std::size_t k) { return trial(k, derive_seed(base_seed, k)); });
}

std::size_t required_run(double eps0) {
  if (!(eps0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps0 must be positive");
  const double q0 = eps0 * eps0 / 2.0;
  if (q0 >= 1.0) return 0;
  auto tail = [q0](std::size_t m) { return std::pow(1.0 - q0, static_cast<double>(m)); };
  auto m = static_cast<std::size_t>(std::ceil(std::log(0.05) / std::log1p(-q0)));
  while (tail(m) > 0.05) ++m;
  while (m > 0 && tail(m - 1) <= 0.05) --m;
  return m;
}

EscalationResult dimension_escalation(const DensityMatrix& tau_big, double eps0,
                                      std::uint64_t seed, const EscalationOptions& options) {
  const int big = tau_big.dim();
  EscalationResult out;
  out.required_run = required_run(eps0);
  const RealVector diag = tau_big.matrix().diagonal().real();
  Rng rng(seed);

  out.kept.push_back(0);
  double p_inside = diag(0);
  int next = 1;
  std::size_t run = 0;
  auto spend = [&](std::size_t shots) {
    if (out.n0 + shots > options.budget) {
      throw Error(ErrorCode::BudgetExceeded,
                  "escalation needs more than " + std::to_string(options.budget) + " measurements");
    }
    out.n0 += shots;
  };
  while (run < out.required_run) {
    spend(1);
    if (rng.uniform() < p_inside) {
      ++run;
      if (out.first_hit == 0) out.first_hit = out.n0;
      continue;
    }
    run = 0;
    if (next >= big) continue;
    bool keep = true;
    if (options.refine) {
      spend(options.refine_shots);
      std::size_t hits = 0;
      for (std::size_t s = 0; s < options.refine_shots; ++s) hits += rng.uniform() < diag(next) ? 1 : 0;
      keep = static_cast<double>(hits) >=
             options.refine_threshold * static_cast<double>(options.refine_shots);
    }
    (keep ? out.kept : out.rejected).push_back(next);
    // Rejected vectors stay inside the measured projector so they are not
    // offered again.
    p_inside += diag(next);
    ++next;
  }
  out.d_eff = static_cast<int>(out.kept.size());
  out.projector = ComplexMatrix::Zero(big, big);
  for (int k : out.kept) out.projector(k, k) = 1.0;
  return out;
}

EscalationTrial escalate_and_estimate(const DensityMatrix& tau_big, double eps0,
                                      std::size_t n_tomography, std::uint64_t seed,
                                      const EscalationOptions& options) {
  const int big = tau_big.dim();
  EscalationResult esc = dimension_escalation(tau_big, eps0, derive_seed(seed, 0), options);
  const int d = esc.d_eff;
  ComplexMatrix w = ComplexMatrix::Zero(big, d);
  for (int k = 0; k < d; ++k) w(esc.kept[static_cast<std::size_t>(k)], k) = 1.0;

  if (d == 1) {
    DensityMatrix estimate(w * w.adjoint());
    const double dist = std::sqrt(hs_distance_sq(estimate.matrix(), tau_big.matrix()));
    return EscalationTrial{std::move(esc), std::move(estimate), dist, 0};
  }

  const ComplexMatrix compressed = w.adjoint() * tau_big.matrix() * w;
  const DensityMatrix guess = DensityMatrix::maximally_mixed(d);
  const StrategyConfig plan = highdim::strategy1_realization(guess, 1.0, static_cast<double>(d));
  std::vector<double> weights;
  for (const auto& item : plan.items()) weights.push_back(item.weight);
  const auto counts = largest_remainder(weights, n_tomography);

  Rng rng(derive_seed(seed, 1));
  MeasurementRecord record(seed);
  std::size_t shots = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) continue;
    const ObservableSpec& spec = plan.items()[b].observable;
    std::vector<double> p;
    double inside = 0.0;
    for (const auto& o : spec.outcomes()) {
      p.push_back(std::max(trace_product(compressed, o.projector), 0.0));
      inside += p.back();
    }
    p.push_back(std::max(1.0 - inside, 0.0));
    const auto cumulative = cumulative_of(p);
    const std::size_t k = record.add_observable("b" + std::to_string(b + 1), spec);
    for (std::size_t s = 0; s < counts[b]; ++s) {
      const std::size_t a = draw(cumulative, rng);
      ++shots;
      if (a < spec.size()) record.append_outcome(k, a);
    }
  }
  const DensityMatrix local = ml_estimate(record, d);
  DensityMatrix estimate(w * local.matrix() * w.adjoint());
  const double dist = std::sqrt(hs_distance_sq(estimate.matrix(), tau_big.matrix()));
  return EscalationTrial{std::move(esc), std::move(estimate), dist, shots};
}

}  // namespace tomoplan::sim
