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

#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

ComplexMatrix random_ginibre(int d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  return g;
}

ComplexMatrix random_hermitian(int d, Rng& rng) {
  const ComplexMatrix g = random_ginibre(d, rng);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_unitary(int d, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_ginibre(d, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const Complex phase = r(k, k) / std::abs(r(k, k));
    q.col(k) *= phase;
  }
  return q;
}

DensityMatrix random_density(int d, Rng& rng, double mix) {
  const ComplexMatrix g = random_ginibre(d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - mix) * rho + mix * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

ObservableSpec random_observable(int d, Rng& rng) {
  const ComplexMatrix u = random_unitary(d, rng);
  std::vector<tomoplan::Outcome> outcomes;
  for (int k = 0; k < d; ++k) {
    const ComplexVector v = u.col(k);
    outcomes.push_back({static_cast<double>(k) - 0.5 * (d - 1), v * v.adjoint()});
  }
  return ObservableSpec(std::move(outcomes));
}

ObservableSpec random_coarse_observable(int d, int blocks, Rng& rng) {
  const ComplexMatrix u = random_unitary(d, rng);
  std::vector<tomoplan::Outcome> outcomes;
  for (int b = 0; b < blocks; ++b) {
    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    for (int k = b; k < d; k += blocks) p += u.col(k) * u.col(k).adjoint();
    outcomes.push_back({static_cast<double>(b + 1), p});
  }
  return ObservableSpec(std::move(outcomes));
}

StrategyConfig random_strategy(int d, int m, double w, Rng& rng) {
  std::vector<tomoplan::StrategyItem> items;
  for (int k = 0; k < m; ++k) items.push_back({random_observable(d, rng), w * (1.0 + rng.uniform())});
  return StrategyConfig(std::move(items));
}

Complex naive_trace(const ComplexMatrix& x, const ComplexMatrix& y) {
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) sum += std::conj(x(k, i)) * y(k, i);
  }
  return sum;
}

double q_form_direct(const ComplexMatrix& rho, const ObservableSpec& a, const ComplexMatrix& tau) {
  double sum = 0.0;
  for (const auto& o : a.outcomes()) {
    const double wr = naive_trace(rho, o.projector).real();
    const double wt = naive_trace(tau, o.projector).real();
    sum += (wr - wt) * (wr - wt) / wt;
  }
  return sum;
}

std::vector<ComplexMatrix> gram_schmidt_basis(int d) {
  // Candidates: e_II - e_dd, e_IJ + e_JI, i(e_IJ - e_JI); orthonormalized.
  std::vector<ComplexMatrix> raw;
  for (int i = 0; i + 1 < d; ++i) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(i, i) = 1.0;
    m(d - 1, d - 1) = -1.0;
    raw.push_back(m);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(i, j) = re(j, i) = 1.0;
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(i, j) = Complex(0.0, 1.0);
      im(j, i) = Complex(0.0, -1.0);
      raw.push_back(re);
      raw.push_back(im);
    }
  }
  std::vector<ComplexMatrix> out;
  for (ComplexMatrix m : raw) {
    for (const auto& b : out) m -= 2.0 * naive_trace(b, m).real() * b;
    m /= std::sqrt(2.0 * naive_trace(m, m).real());
    out.push_back(m);
  }
  return out;
}

namespace {

double divergence(const DensityMatrix& tau, const StrategyConfig& s, const ComplexMatrix& rho) {
  double sum = 0.0;
  for (const auto& item : s.items()) {
    for (const auto& o : item.observable.outcomes()) {
      const double wt = naive_trace(tau.matrix(), o.projector).real();
      const double wr = naive_trace(rho, o.projector).real();
      sum += item.weight * wt * std::log(wt / wr);
    }
  }
  return sum;
}

}  // namespace

RealMatrix fisher_by_differences(const DensityMatrix& tau, const StrategyConfig& s,
                                 const std::vector<ComplexMatrix>& basis, double h) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  RealMatrix hess(n, n);
  const ComplexMatrix t = tau.matrix();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const ComplexMatrix fr = basis[static_cast<std::size_t>(r)];
      const ComplexMatrix fc = basis[static_cast<std::size_t>(c)];
      const double fpp = divergence(tau, s, t + h * fr + h * fc);
      const double fpm = divergence(tau, s, t + h * fr - h * fc);
      const double fmp = divergence(tau, s, t - h * fr + h * fc);
      const double fmm = divergence(tau, s, t - h * fr - h * fc);
      hess(r, c) = hess(c, r) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return hess;
}

double m_form_direct(const DensityMatrix& tau, const StrategyConfig& s, const ComplexMatrix& x,
                     const ComplexMatrix& y) {
  double sum = 0.0;
  for (const auto& item : s.items()) {
    for (const auto& o : item.observable.outcomes()) {
      const double wt = naive_trace(tau.matrix(), o.projector).real();
      sum += item.weight * naive_trace(x, o.projector).real() * naive_trace(y, o.projector).real() / wt;
    }
  }
  return sum;
}

ComplexMatrix component_table_direct(const DensityMatrix& tau, const StrategyConfig& s,
                                     const ComplexMatrix& basis) {
  const int d = tau.dim();
  ComplexMatrix a = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& item : s.items()) {
    for (const auto& o : item.observable.outcomes()) {
      const double w = naive_trace(tau.matrix(), o.projector).real();
      const ComplexMatrix local = basis.adjoint() * o.projector * basis;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          for (int k = 0; k < d; ++k) {
            for (int l = 0; l < d; ++l) {
              a(i * d + j, k * d + l) += item.weight * local(i, j) * std::conj(local(k, l)) / (2.0 * w);
            }
          }
        }
      }
    }
  }
  return a;
}

ComplexMatrix twirl_by_integration(const DensityMatrix& tau, const StrategyConfig& s,
                                   const ComplexMatrix& basis, const std::vector<double>& spectrum,
                                   int points) {
  const int d = tau.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d * d, d * d);
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / points;
    ComplexVector phases(d);
    for (int i = 0; i < d; ++i) phases(i) = std::exp(Complex(0.0, phi * spectrum[static_cast<std::size_t>(i)]));
    const ComplexMatrix u = basis * phases.asDiagonal() * basis.adjoint();
    std::vector<tomoplan::StrategyItem> items;
    for (const auto& item : s.items()) {
      std::vector<tomoplan::Outcome> outcomes;
      for (const auto& o : item.observable.outcomes()) {
        ComplexMatrix p = u * o.projector * u.adjoint();
        outcomes.push_back({o.label, 0.5 * (p + p.adjoint())});
      }
      items.push_back({ObservableSpec(std::move(outcomes)), item.weight});
    }
    sum += component_table_direct(tau, StrategyConfig(std::move(items)), basis);
  }
  return sum / static_cast<double>(points);
}

double det_by_elimination(RealMatrix a) {
  const auto n = a.rows();
  double det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (a(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

double trace_inverse_by_elimination(RealMatrix a) {
  const auto n = a.rows();
  RealMatrix inv = RealMatrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    a.row(pivot).swap(a.row(c));
    inv.row(pivot).swap(inv.row(c));
    const double p = a(c, c);
    if (p == 0.0) throw std::runtime_error("singular");
    a.row(c) /= p;
    inv.row(c) /= p;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv.trace();
}

}  // namespace oracle
