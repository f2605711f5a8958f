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
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectroscope/numerics/linalg.hpp"

namespace spectroscope::model {

using numerics::Basis4;
using numerics::Complex;
using numerics::Matrix4c;
using numerics::Vector4c;

/// Static parameters of the qubit pair. All energies share one frequency
/// unit with hbar = 1 (GHz and ns in the shipped configs).
struct SystemParams {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double g = 0.0;

  void validate() const {
    if (!(delta1 >= 0.0 && delta2 >= 0.0))
      throw std::invalid_argument("SystemParams: tunnel splittings must be >= 0");
    if (!std::isfinite(eps1) || !std::isfinite(eps2) || !std::isfinite(g))
      throw std::invalid_argument("SystemParams: non-finite parameter");
  }
};

/// v(t) = A cos(omega t - phi0), applied with equal amplitude to both qubits.
/// `amplitude2` is a numerics-only hook for unequal amplitudes; the closed
/// forms reject it.
struct Drive {
  double amplitude = 0.0;
  double omega = 1.0;
  double phi0 = 0.0;
  std::optional<double> amplitude2;

  double period() const { return 2.0 * std::numbers::pi / omega; }
  double second_amplitude() const { return amplitude2.value_or(amplitude); }
  bool equal_amplitudes() const { return !amplitude2 || *amplitude2 == amplitude; }

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("Drive: omega must be > 0");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("Drive: non-finite amplitude");
  }
};

/// Fold a quasienergy into the half-open Floquet zone [-omega/2, omega/2).
inline double fold_to_zone(double value, double omega) {
  double r = value - omega * std::floor(value / omega + 0.5);
  if (r >= 0.5 * omega) r -= omega;
  if (r < -0.5 * omega) r += omega;
  return r;
}

/// sigma_z eigenvalue (+1 or -1) of qubit q (1 or 2) in basis index i (0..3).
/// Index 0 carries +1 on both qubits (labelled |down,down>), then
/// |down,up>, |up,down>, |up,up>.
constexpr int sz(int q, int i) { return ((q == 1 ? (i >> 1) : i) & 1) ? -1 : 1; }

/// Hamiltonian of the driven pair, split into a static part and the diagonal
/// drive couplings so that evaluation at many times is cheap.
class DrivenHamiltonian {
 public:
  DrivenHamiltonian(const SystemParams& p, const Drive& d) : drive_(d) {
    p.validate();
    d.validate();
    static_ = Matrix4c::Zero();
    for (int i = 0; i < 4; ++i) {
      const int s1 = sz(1, i), s2 = sz(2, i);
      static_(i, i) = -0.5 * (p.eps1 * s1 + p.eps2 * s2) - 0.5 * p.g * s1 * s2;
      drive_diag_[static_cast<std::size_t>(i)] = -0.5 * (d.amplitude * s1 + d.second_amplitude() * s2);
      static_(i, i ^ 2) = -0.5 * p.delta1;
      static_(i, i ^ 1) = -0.5 * p.delta2;
    }
  }

  /// H(t) with the drive amplitude factored as cos(omega t - phi0).
  Matrix4c operator()(double t) const {
    Matrix4c h = static_;
    const double c = std::cos(drive_.omega * t - drive_.phi0);
    for (int i = 0; i < 4; ++i) h(i, i) += drive_diag_[static_cast<std::size_t>(i)] * c;
    return h;
  }

  const Matrix4c& static_part() const noexcept { return static_; }
  const std::array<double, 4>& drive_diagonal() const noexcept { return drive_diag_; }
  const Drive& drive() const noexcept { return drive_; }

 private:
  Drive drive_;
  Matrix4c static_;
  std::array<double, 4> drive_diag_{};
};

inline Matrix4c hamiltonian_at(const SystemParams& p, const Drive& d, double t) {
  return DrivenHamiltonian(p, d)(t);
}

/// Exact eigenbasis of -(eps sigma_z + delta sigma_x)/2. `down` is the
/// ground state, `up` the excited one, gap = sqrt(eps^2 + delta^2).
struct SingleQubitEigenbasis {
  Eigen::Vector2d down;
  Eigen::Vector2d up;
  double gap = 0.0;
};

inline SingleQubitEigenbasis single_qubit_eigenbasis(double eps, double delta) {
  if (eps == 0.0 && delta == 0.0)
    throw std::invalid_argument("single_qubit_eigenbasis: eps and delta both zero");
  const double theta = std::atan2(delta, eps);
  SingleQubitEigenbasis b;
  b.down = Eigen::Vector2d(std::cos(0.5 * theta), std::sin(0.5 * theta));
  b.up = Eigen::Vector2d(-std::sin(0.5 * theta), std::cos(0.5 * theta));
  b.gap = std::hypot(eps, delta);
  return b;
}

/// Exact eigenstates of the uncoupled static Hamiltonian ordered by index:
/// state i is the product state continuously connected to computational
/// state i as delta -> 0, for either sign of eps.
inline Basis4 product_eigenbasis(const SystemParams& p) {
  auto qubit = [](double eps, double delta) {
    const double phi = eps == 0.0 ? std::numbers::pi / 2 : std::atan(delta / eps);
    std::array<Eigen::Vector2d, 2> v;
    v[0] = Eigen::Vector2d(std::cos(0.5 * phi), std::sin(0.5 * phi));
    v[1] = Eigen::Vector2d(-std::sin(0.5 * phi), std::cos(0.5 * phi));
    return v;
  };
  const auto q1 = qubit(p.eps1, p.delta1);
  const auto q2 = qubit(p.eps2, p.delta2);
  Basis4 basis;
  for (int i = 0; i < 4; ++i) {
    const auto& a = q1[static_cast<std::size_t>(i >> 1)];
    const auto& b = q2[static_cast<std::size_t>(i & 1)];
    Vector4c v;
    for (int j = 0; j < 4; ++j) v(j) = a(j >> 1) * b(j & 1);
    basis[static_cast<std::size_t>(i)] = v;
  }
  return basis;
}

/// Second-order perturbative eigenstates and energies of the uncoupled pair,
/// in the closed form quoted with the analytic Floquet results.
struct UncoupledEigensystem {
  Basis4 states;
  std::array<double, 4> energies{};
  std::vector<std::string> warnings;
};

inline UncoupledEigensystem uncoupled_eigensystem(const SystemParams& p) {
  if (p.eps1 == 0.0 || p.eps2 == 0.0)
    throw std::invalid_argument("uncoupled_eigensystem: eps1 and eps2 must be nonzero");
  const double r1 = p.delta1 / (2.0 * p.eps1);
  const double r2 = p.delta2 / (2.0 * p.eps2);
  const double c = 1.0 - 0.5 * r1 * r1 - 0.5 * r2 * r2;
  const double x = r1 * r2;

  auto vec = [](double a, double b, double cc, double dd) {
    Vector4c v;
    v << a, b, cc, dd;
    return v;
  };
  UncoupledEigensystem out;
  out.states[0] = vec(c, r2, r1, x);
  out.states[1] = vec(-r2, c, -x, r1);
  out.states[2] = vec(-r1, -x, c, r2);
  out.states[3] = vec(x, -r1, -r2, c);

  const double s1 = p.delta1 * p.delta1 / (4.0 * p.eps1);
  const double s2 = p.delta2 * p.delta2 / (4.0 * p.eps2);
  out.energies = {-0.5 * (p.eps1 + p.eps2) - s1 - s2, -0.5 * (p.eps1 - p.eps2) - s1 + s2,
                  0.5 * (p.eps1 - p.eps2) + s1 - s2, 0.5 * (p.eps1 + p.eps2) + s1 + s2};

  constexpr double kSmall = 0.25;
  if (std::abs(r1) * 2.0 > kSmall || std::abs(r2) * 2.0 > kSmall)
    out.warnings.emplace_back("tunnel splitting not small compared with bias");
  if (std::abs(p.g) >= std::min(std::abs(p.eps1), std::abs(p.eps2)))
    out.warnings.emplace_back("|g| not below min |eps_q|");
  return out;
}

}  // namespace spectroscope::model
