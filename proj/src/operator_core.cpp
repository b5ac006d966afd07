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

#include "tomoplan/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tomoplan {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimMismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& h) {
  return max_abs(h - h.adjoint());
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  require_square(m, "density matrix");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidState, "non-finite entries");
  if (hermiticity_defect(m) > tol::kHermitian) {
    throw Error(ErrorCode::NotHermitian, "density matrix is not hermitian");
  }
  m_ = (m + m.adjoint()) * 0.5;
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw Error(ErrorCode::InvalidState, "trace " + std::to_string(tr) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  eigenvalues_ = es.eigenvalues();
  if (eigenvalues_(0) < -tol::kPsd) {
    throw Error(ErrorCode::InvalidState,
                "negative eigenvalue " + std::to_string(eigenvalues_(0)));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
  const auto d = static_cast<Eigen::Index>(probabilities.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = probabilities[static_cast<std::size_t>(i)];
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw Error(ErrorCode::InvalidState, "zero state vector");
  return DensityMatrix(rank_one_projector(psi / norm));
}

double DensityMatrix::purity() const {
  return (m_ * m_).trace().real();
}

ObservableSpec::ObservableSpec(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw Error(ErrorCode::InvalidObservable, "no outcomes");
  dim_ = static_cast<int>(outcomes_.front().projector.rows());
  ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    const auto& p = outcomes_[i].projector;
    require_square(p, "projector");
    if (p.rows() != dim_) throw Error(ErrorCode::DimMismatch, "projector dimensions differ");
    if (!std::isfinite(outcomes_[i].label)) {
      throw Error(ErrorCode::InvalidObservable, "non-finite label");
    }
    if (hermiticity_defect(p) > tol::kHermitian) {
      throw Error(ErrorCode::InvalidObservable, "projector is not hermitian");
    }
    if (max_abs(p * p - p) > tol::kHermitian) {
      throw Error(ErrorCode::InvalidObservable, "projector is not idempotent");
    }
    if (p.trace().real() < 0.5) throw Error(ErrorCode::InvalidObservable, "zero projector");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(outcomes_[i].label - outcomes_[j].label) <= 1e-12) {
        throw Error(ErrorCode::InvalidObservable, "duplicate outcome label");
      }
      if (max_abs(p * outcomes_[j].projector) > tol::kHermitian) {
        throw Error(ErrorCode::InvalidObservable, "projectors are not orthogonal");
      }
    }
    sum += p;
  }
  if (max_abs(sum - ComplexMatrix::Identity(dim_, dim_)) > tol::kHermitian) {
    throw Error(ErrorCode::InvalidObservable, "projectors do not sum to the identity");
  }
}

ObservableSpec ObservableSpec::from_basis(const ComplexMatrix& unitary, std::vector<double> labels) {
  require_square(unitary, "basis");
  const auto d = unitary.cols();
  if (labels.empty()) {
    labels.resize(static_cast<std::size_t>(d));
    std::iota(labels.begin(), labels.end(), 0.0);
  }
  if (static_cast<Eigen::Index>(labels.size()) != d) {
    throw Error(ErrorCode::DimMismatch, "one label per basis vector required");
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(labels.size());
  for (Eigen::Index k = 0; k < d; ++k) {
    outcomes.push_back({labels[static_cast<std::size_t>(k)], rank_one_projector(unitary.col(k))});
  }
  return ObservableSpec(std::move(outcomes));
}

std::optional<std::size_t> ObservableSpec::find(double label) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (std::abs(outcomes_[i].label - label) <= 1e-9 * std::max(1.0, std::abs(label))) return i;
  }
  return std::nullopt;
}

ComplexMatrix ObservableSpec::reconstruct() const {
  ComplexMatrix h = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& o : outcomes_) h += o.label * o.projector;
  return h;
}

HermitianBasis hermitian_basis(int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "hermitian_basis needs d >= 2");
  HermitianBasis basis;
  basis.dim = d;
  basis.traceless.reserve(static_cast<std::size_t>(d * d - 1));
  for (int k = 1; k < d; ++k) {
    ComplexMatrix f = ComplexMatrix::Zero(d, d);
    const double c = 1.0 / std::sqrt(2.0 * k * (k + 1));
    for (int i = 0; i < k; ++i) f(i, i) = c;
    f(k, k) = -k * c;
    basis.traceless.push_back(std::move(f));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix f = ComplexMatrix::Zero(d, d);
      f(i, j) = 0.5;
      f(j, i) = 0.5;
      basis.traceless.push_back(std::move(f));
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix f = ComplexMatrix::Zero(d, d);
      f(i, j) = Complex(0.0, -0.5);
      f(j, i) = Complex(0.0, 0.5);
      basis.traceless.push_back(std::move(f));
    }
  }
  basis.identity_element = ComplexMatrix::Identity(d, d) / std::sqrt(2.0 * d);
  return basis;
}

RealVector hs_coordinates(const ComplexMatrix& x) {
  require_square(x, "operator");
  const int d = static_cast<int>(x.rows());
  RealVector out(d * d - 1);
  int r = 0;
  // Running prefix sum of the diagonal keeps the Gell-Mann part O(d).
  double prefix = 0.0;
  for (int k = 1; k < d; ++k) {
    prefix += x(k - 1, k - 1).real();
    const double c = 1.0 / std::sqrt(2.0 * k * (k + 1));
    out(r++) = 2.0 * c * (prefix - k * x(k, k).real());
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) out(r++) = x(i, j).real() + x(j, i).real();
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) out(r++) = x(j, i).imag() - x(i, j).imag();
  }
  return out;
}

ComplexMatrix from_hs_coordinates(const RealVector& x, int d) {
  if (x.size() != d * d - 1) throw Error(ErrorCode::DimMismatch, "coordinate vector length");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  int r = 0;
  for (int k = 1; k < d; ++k) {
    const double c = x(r++) / std::sqrt(2.0 * k * (k + 1));
    for (int i = 0; i < k; ++i) m(i, i) += c;
    m(k, k) -= k * c;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      m(i, j) += 0.5 * x(r);
      m(j, i) += 0.5 * x(r);
      ++r;
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      m(i, j) += Complex(0.0, -0.5 * x(r));
      m(j, i) += Complex(0.0, 0.5 * x(r));
      ++r;
    }
  }
  return m;
}

Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorCode::DimMismatch, "hs_inner operands differ in shape");
  }
  return 2.0 * (x.adjoint() * y).trace();
}

ObservableSpec spectral_decompose(const ComplexMatrix& h, double tol) {
  require_square(h, "observable");
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_defect(h) > tol * scale) {
    throw Error(ErrorCode::NotHermitian, "observable is not hermitian");
  }
  const ComplexMatrix herm = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  const RealVector& ev = es.eigenvalues();
  const ComplexMatrix& vecs = es.eigenvectors();
  const double norm = std::max(1.0, ev.cwiseAbs().maxCoeff());

  std::vector<Outcome> outcomes;
  Eigen::Index start = 0;
  const Eigen::Index n = ev.size();
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && ev(end) - ev(end - 1) <= tol * norm) ++end;
    const auto block = vecs.middleCols(start, end - start);
    const double label = ev.segment(start, end - start).mean();
    outcomes.push_back({label, block * block.adjoint()});
    start = end;
  }
  std::reverse(outcomes.begin(), outcomes.end());
  return ObservableSpec(std::move(outcomes));
}

const std::array<ComplexMatrix, 3>& pauli() {
  static const std::array<ComplexMatrix, 3> sigma = [] {
    std::array<ComplexMatrix, 3> s;
    s[0] = ComplexMatrix::Zero(2, 2);
    s[0](0, 1) = 1.0;
    s[0](1, 0) = 1.0;
    s[1] = ComplexMatrix::Zero(2, 2);
    s[1](0, 1) = Complex(0.0, -1.0);
    s[1](1, 0) = Complex(0.0, 1.0);
    s[2] = ComplexMatrix::Zero(2, 2);
    s[2](0, 0) = 1.0;
    s[2](1, 1) = -1.0;
    return s;
  }();
  return sigma;
}

DensityMatrix bloch_to_density(const BlochVector& a) {
  if (!a.allFinite() || a.norm() > 1.0 + tol::kBall) {
    throw Error(ErrorCode::OutOfBall, "Bloch vector outside the unit ball");
  }
  const auto& s = pauli();
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  for (int r = 0; r < 3; ++r) m += a(r) * s[static_cast<std::size_t>(r)];
  return DensityMatrix(m * 0.5);
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw Error(ErrorCode::DimMismatch, "Bloch vectors exist only for d = 2");
  const auto& s = pauli();
  BlochVector a;
  for (int r = 0; r < 3; ++r) a(r) = trace_product(rho.matrix(), s[static_cast<std::size_t>(r)]);
  return a;
}

ObservableSpec axis_observable(const Vec3& c) {
  const double len = c.norm();
  if (std::abs(len - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "measurement axis must be a unit vector");
  }
  const auto& s = pauli();
  ComplexMatrix cs = c(0) * s[0] + c(1) * s[1] + c(2) * s[2];
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  return ObservableSpec({{1.0, (id + cs) * 0.5}, {-1.0, (id - cs) * 0.5}});
}

double trace_product(const ComplexMatrix& rho, const ComplexMatrix& p) {
  // Tr(rho P) = sum_ij rho_ij P_ji
  return rho.cwiseProduct(p.transpose()).sum().real();
}

std::vector<OutcomeProbability> outcome_probs(const DensityMatrix& rho, const ObservableSpec& a) {
  if (rho.dim() != a.dim()) throw Error(ErrorCode::DimMismatch, "state and observable dims differ");
  std::vector<OutcomeProbability> out;
  out.reserve(a.size());
  for (const auto& o : a.outcomes()) {
    out.push_back({o.label, std::clamp(trace_product(rho.matrix(), o.projector), 0.0, 1.0)});
  }
  return out;
}

ComplexMatrix rank_one_projector(const ComplexVector& v) {
  return v * v.adjoint();
}

double hs_distance_sq(const ComplexMatrix& x, const ComplexMatrix& y) {
  const ComplexMatrix diff = x - y;
  return (diff * diff).trace().real();
}

}  // namespace tomoplan
