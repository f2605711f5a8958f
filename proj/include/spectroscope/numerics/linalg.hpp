// Copyright 2026 The Spectroscope Authors
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

#include <Eigen/Dense>

namespace spectroscope::numerics {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Four basis states of the two-qubit Hilbert space, index 0 <-> label 1.
using Basis4 = std::array<Vector4c, 4>;

inline Basis4 computational_basis() {
  Basis4 b;
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = Vector4c::Unit(i);
  return b;
}

/// Largest absolute entry of U^dagger U - 1.
template <class Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.cols();
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

/// Largest absolute entry of A - A^dagger.
template <class Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Nearest unitary matrix (polar factor W V^dagger of the SVD).
template <class Matrix>
Matrix nearest_unitary(const Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Exact propagator exp(-i H dt) of a constant Hermitian H via diagonalization.
template <class Matrix>
Matrix hermitian_propagator(const Matrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& v = es.eigenvectors();
  Matrix phases = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases(i, i) = std::exp(-kI * es.eigenvalues()(i) * dt);
  return v * phases * v.adjoint();
}

/// Gram-Schmidt on the columns, in place, keeping column order.
template <class Matrix>
void orthonormalize_columns(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
    m.col(j).normalize();
  }
}

}  // namespace spectroscope::numerics
