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

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tomoplan/error.hpp"

namespace tomoplan {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

/// Bloch vector of a qubit state, rho = (1 + a.sigma)/2.
using BlochVector = Eigen::Vector3d;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
/// Smallest outcome probability / eigenvalue that still counts as interior.
inline constexpr double kFloor = 1e-8;
/// Relative eigenvalue gap below which spectral projectors are merged.
inline constexpr double kCluster = 1e-9;
inline constexpr double kBall = 1e-12;
}  // namespace tol

/// Hermitian, unit-trace, positive semidefinite d x d matrix. Validated on
/// construction and stored exactly hermitian.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix maximally_mixed(int d);
  static DensityMatrix diagonal(std::span<const double> probabilities);
  static DensityMatrix pure(const ComplexVector& psi);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  /// Ascending.
  const RealVector& eigenvalues() const { return eigenvalues_; }
  double min_eigenvalue() const { return eigenvalues_(0); }
  /// min eigenvalue >= tol::kFloor, i.e. the state lies in the interior.
  bool invertible() const { return min_eigenvalue() >= tol::kFloor; }
  double purity() const;

 private:
  ComplexMatrix m_;
  RealVector eigenvalues_;
};

struct Outcome {
  double label;
  ComplexMatrix projector;
};

/// A von Neumann measurement: orthogonal hermitian projectors that resolve
/// the identity, each tagged with a distinct real label.
class ObservableSpec {
 public:
  explicit ObservableSpec(std::vector<Outcome> outcomes);

  /// Rank-one projectors onto the columns of `unitary`. Labels default to
  /// 0, 1, ..., d-1.
  static ObservableSpec from_basis(const ComplexMatrix& unitary, std::vector<double> labels = {});

  int dim() const { return dim_; }
  std::size_t size() const { return outcomes_.size(); }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const Outcome& operator[](std::size_t i) const { return outcomes_[i]; }

  std::optional<std::size_t> find(double label) const;
  /// sum_a a P_a
  ComplexMatrix reconstruct() const;

 private:
  int dim_ = 0;
  std::vector<Outcome> outcomes_;
};

/// Orthonormal basis of the hermitian operators under (X|Y) = 2 Tr(X^dag Y).
/// Traceless elements are ordered: diagonal (generalized Gell-Mann), then
/// real off-diagonal pairs, then imaginary off-diagonal pairs, pairs in
/// lexicographic (I,J) order with I < J.
struct HermitianBasis {
  int dim = 0;
  std::vector<ComplexMatrix> traceless;
  ComplexMatrix identity_element;
};

HermitianBasis hermitian_basis(int d);

/// (F_r | X) for every traceless basis element, for hermitian X. O(d^2);
/// matches hs_inner against hermitian_basis(d).traceless element-wise.
RealVector hs_coordinates(const ComplexMatrix& x);

/// sum_r x_r F_r, the traceless hermitian operator with given coordinates.
ComplexMatrix from_hs_coordinates(const RealVector& x, int d);

/// 2 Tr(X^dag Y).
Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y);

/// Spectral projections of a hermitian matrix; eigenvalues closer than
/// tol * max(1, ||H||) are merged into one outcome labelled by their mean.
/// Outcomes are ordered by decreasing label.
ObservableSpec spectral_decompose(const ComplexMatrix& h, double tol = tol::kCluster);

const std::array<ComplexMatrix, 3>& pauli();

DensityMatrix bloch_to_density(const BlochVector& a);
BlochVector density_to_bloch(const DensityMatrix& rho);

/// B(c) = c.sigma for a unit axis c; outcomes +1 and -1.
ObservableSpec axis_observable(const Vec3& c);

struct OutcomeProbability {
  double label;
  double probability;
};

/// Tr(rho P_a) per outcome, clamped to [0, 1].
std::vector<OutcomeProbability> outcome_probs(const DensityMatrix& rho, const ObservableSpec& a);

/// Re Tr(rho P) without clamping.
double trace_product(const ComplexMatrix& rho, const ComplexMatrix& p);

ComplexMatrix rank_one_projector(const ComplexVector& v);

/// Tr((X - Y)^2) for hermitian X, Y.
double hs_distance_sq(const ComplexMatrix& x, const ComplexMatrix& y);

/// Largest |H_ij - conj(H_ji)|.
double hermiticity_defect(const ComplexMatrix& h);

}  // namespace tomoplan
