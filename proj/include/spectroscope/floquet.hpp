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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spectroscope/errors.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/numerics/fourier.hpp"
#include "spectroscope/numerics/ode.hpp"

namespace spectroscope::floquet {

using model::Drive;
using model::SystemParams;
using numerics::Basis4;
using numerics::Complex;
using numerics::Matrix4c;
using numerics::TimeGrid;
using numerics::Vector4c;

struct FloquetOptions {
  double tol = 1e-11;
  int min_samples = 1024;
  int k_max = -1;                    // < 0: ceil(A/omega) + 30
  double resonance_tolerance = 1e-3; // in units of omega
};

inline int default_k_max(const Drive& d) {
  const double a = std::max(std::abs(d.amplitude), std::abs(d.second_amplitude()));
  return static_cast<int>(std::ceil(a / d.omega)) + 30;
}

/// One-period propagator U(T, 0) for phi0 = 0, projected back onto the unitary
/// group after the period.
inline Matrix4c monodromy(const SystemParams& p, Drive d, double tol) {
  d.phi0 = 0.0;
  const model::DrivenHamiltonian h(p, d);
  const Matrix4c u = numerics::propagate(h, Matrix4c(Matrix4c::Identity()), 0.0, d.period(), tol);
  return numerics::nearest_unitary(u);
}

struct FloquetSpectrum {
  std::array<double, 4> gammas{};
  Matrix4c vectors;  // column alpha = u_alpha(0)
};

/// Quasienergies -arg(lambda)/T folded into [-omega/2, omega/2) together with
/// orthonormalized eigenvectors, in eigensolver order.
inline FloquetSpectrum floquet_spectrum(const Matrix4c& monodromy_matrix, double omega) {
  Eigen::ComplexEigenSolver<Matrix4c> es(monodromy_matrix, true);
  if (es.info() != Eigen::Success) throw ConsistencyError("monodromy eigendecomposition failed", 0.0);
  const double period = 2.0 * std::numbers::pi / omega;
  FloquetSpectrum out;
  out.vectors = es.eigenvectors();
  numerics::orthonormalize_columns(out.vectors);
  for (int a = 0; a < 4; ++a)
    out.gammas[static_cast<std::size_t>(a)] = model::fold_to_zone(-std::arg(es.eigenvalues()(a)) / period, omega);
  return out;
}

/// Quasienergies of a monodromy matrix, ascending.
inline std::array<double, 4> quasienergies(const Matrix4c& monodromy_matrix, double omega) {
  auto g = floquet_spectrum(monodromy_matrix, omega).gammas;
  std::sort(g.begin(), g.end());
  return g;
}

/// Smallest separation between two quasienergies modulo omega.
inline double min_quasienergy_gap(const std::array<double, 4>& gammas, double omega) {
  double gap = omega;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const double d = std::abs(model::fold_to_zone(gammas[static_cast<std::size_t>(a)] - gammas[static_cast<std::size_t>(b)], omega));
      gap = std::min(gap, d);
    }
  return gap;
}

/// Permutation perm maximizing sum_a weight(a, perm[a]) over all 24 choices.
inline std::array<int, 4> best_assignment(const Eigen::Matrix4d& weight) {
  std::array<int, 4> perm{0, 1, 2, 3}, best = perm;
  double best_score = -1.0;
  do {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += weight(a, perm[static_cast<std::size_t>(a)]);
    if (s > best_score + 1e-15) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Reordering of `current` Floquet vectors that best continues `previous`
/// (overlap continuity between adjacent sweep points): result[a] is the
/// column of `current` that continues column a of `previous`.
inline std::array<int, 4> continuity_permutation(const Matrix4c& previous, const Matrix4c& current) {
  const Eigen::Matrix4d overlap = (previous.adjoint() * current).cwiseAbs2();
  return best_assignment(overlap);
}

struct FloquetSolution {
  TimeGrid grid{1.0, 4};
  int k_max = 0;
  std::array<double, 4> gammas{};
  std::array<std::vector<Vector4c>, 4> modes;    // u_alpha(t_j)
  std::array<std::vector<Vector4c>, 4> fourier;  // u_{alpha k}, index k + k_max
  Matrix4c initial;                              // column alpha = u_alpha(0)
  Matrix4c monodromy;
  double min_gap = 0.0;
  bool resonant = false;

  const Vector4c& component(int alpha, int k) const {
    return fourier[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(k + k_max)];
  }
};

/// Floquet modes u_alpha(t) = exp(i gamma_alpha t) U(t, 0) v_alpha on the
/// period grid, with Fourier components. Modes are labelled so that mode
/// alpha carries the largest weight on computational state alpha.
inline FloquetSolution floquet_modes(const SystemParams& p, Drive d, const FloquetOptions& opt = {}) {
  d.phi0 = 0.0;
  FloquetSolution sol;
  sol.k_max = opt.k_max >= 0 ? opt.k_max : default_k_max(d);
  sol.grid = TimeGrid::for_harmonics(d.omega, sol.k_max, opt.min_samples);
  const int n = sol.grid.size();

  const model::DrivenHamiltonian h(p, d);
  const auto times = sol.grid.times_with_endpoint();
  const auto u = numerics::propagate_on_grid(h, Matrix4c(Matrix4c::Identity()), std::span<const double>(times), opt.tol);
  sol.monodromy = numerics::nearest_unitary(u.back());

  const FloquetSpectrum spec = floquet_spectrum(sol.monodromy, d.omega);

  // Label by dominant computational component, averaged over the period.
  std::array<std::vector<Vector4c>, 4> raw;
  Eigen::Matrix4d weight = Eigen::Matrix4d::Zero();
  for (int a = 0; a < 4; ++a) {
    auto& m = raw[static_cast<std::size_t>(a)];
    m.resize(static_cast<std::size_t>(n));
    const double gamma = spec.gammas[static_cast<std::size_t>(a)];
    for (int j = 0; j < n; ++j) {
      const double t = sol.grid.time(j);
      m[static_cast<std::size_t>(j)] = std::polar(1.0, gamma * t) * (u[static_cast<std::size_t>(j)] * spec.vectors.col(a));
      weight.row(a) += m[static_cast<std::size_t>(j)].cwiseAbs2().transpose() / n;
    }
  }
  const auto perm = best_assignment(weight);  // perm[a] = label of raw mode a
  for (int a = 0; a < 4; ++a) {
    const auto label = static_cast<std::size_t>(perm[static_cast<std::size_t>(a)]);
    sol.gammas[label] = spec.gammas[static_cast<std::size_t>(a)];
    sol.modes[label] = std::move(raw[static_cast<std::size_t>(a)]);
    sol.initial.col(static_cast<Eigen::Index>(label)) = spec.vectors.col(a);
  }
  for (int a = 0; a < 4; ++a)
    sol.fourier[static_cast<std::size_t>(a)] = numerics::fourier_components(
        std::span<const Vector4c>(sol.modes[static_cast<std::size_t>(a)]), sol.grid, -sol.k_max, sol.k_max);

  sol.min_gap = min_quasienergy_gap(sol.gammas, d.omega);
  sol.resonant = sol.min_gap < opt.resonance_tolerance * d.omega;
  return sol;
}

/// S-matrix and averaged transition probabilities Pbar = S^T S.
struct TransitionTable {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d pbar = Eigen::Matrix4d::Zero();
  bool resonant = false;
  double route_discrepancy = 0.0;
};

inline constexpr double kRouteAbortThreshold = 1e-6;

/// S_{alpha x} from the Fourier components and, independently, from the
/// time average of |<u_alpha(t)|x>|^2 on the grid.
inline TransitionTable s_matrix(const FloquetSolution& sol, const Basis4& basis) {
  TransitionTable out;
  Eigen::Matrix4d time_avg = Eigen::Matrix4d::Zero();
  const int n = sol.grid.size();
  for (int a = 0; a < 4; ++a) {
    for (int x = 0; x < 4; ++x) {
      const Vector4c& bx = basis[static_cast<std::size_t>(x)];
      double fourier_sum = 0.0;
      for (const auto& c : sol.fourier[static_cast<std::size_t>(a)]) fourier_sum += std::norm(bx.dot(c));
      double avg = 0.0;
      for (const auto& v : sol.modes[static_cast<std::size_t>(a)]) avg += std::norm(bx.dot(v));
      out.s(a, x) = fourier_sum;
      time_avg(a, x) = avg / n;
    }
  }
  out.route_discrepancy = (out.s - time_avg).cwiseAbs().maxCoeff();
  if (out.route_discrepancy > kRouteAbortThreshold)
    throw ConsistencyError("S-matrix Fourier and time-average routes disagree", out.route_discrepancy);
  out.pbar = out.s.transpose() * out.s;
  out.resonant = sol.resonant;
  return out;
}

struct OracleOptions {
  int samples_per_period = 128;
  double tol = 1e-11;
};

/// Direct average of |<b|U(t, 0)|a>|^2 over t in [0, n_periods T) and over
/// n_phases uniformly spaced drive phases; returns the full 4x4 table with
/// entry (a, b). Uses only the group property of the propagator, never the
/// Floquet decomposition.
inline Eigen::Matrix4d time_domain_average(const SystemParams& p, const Drive& d, const Basis4& basis,
                                           int n_periods, int n_phases, const OracleOptions& opt = {}) {
  if (n_periods < 100) throw std::invalid_argument("time_domain_oracle: n_periods must be >= 100");
  if (n_phases < 8) throw std::invalid_argument("time_domain_oracle: n_phases must be >= 8");
  const int m = opt.samples_per_period;
  Matrix4c basis_mat;
  for (int x = 0; x < 4; ++x) basis_mat.col(x) = basis[static_cast<std::size_t>(x)];

  Eigen::Matrix4d total = Eigen::Matrix4d::Zero();
  for (int ph = 0; ph < n_phases; ++ph) {
    Drive dp = d;
    dp.phi0 = 2.0 * std::numbers::pi * ph / n_phases;
    const model::DrivenHamiltonian h(p, dp);
    std::vector<double> times(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) times[static_cast<std::size_t>(j)] = dp.period() * j / m;
    const auto u = numerics::propagate_on_grid(h, Matrix4c(Matrix4c::Identity()), std::span<const double>(times), opt.tol);
    const Matrix4c mono = numerics::nearest_unitary(u.back());
    // Rows: <b| U(s_j, 0) expressed against basis bras.
    std::vector<Matrix4c> bra(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) bra[static_cast<std::size_t>(j)] = basis_mat.adjoint() * u[static_cast<std::size_t>(j)];
    Matrix4c psi = basis_mat;  // column a: state after n whole periods
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    for (int per = 0; per < n_periods; ++per) {
      for (int j = 0; j < m; ++j) acc += (bra[static_cast<std::size_t>(j)] * psi).cwiseAbs2();
      psi = mono * psi;
    }
    // acc(b, a) holds |<b|U|a>|^2.
    total += acc.transpose() / (static_cast<double>(n_periods) * m);
  }
  return total / n_phases;
}

inline double time_domain_oracle(const SystemParams& p, const Drive& d, int a, int b, int n_periods,
                                 int n_phases, const Basis4& basis) {
  if (a < 0 || a > 3 || b < 0 || b > 3) throw std::invalid_argument("time_domain_oracle: state index out of range");
  return time_domain_average(p, d, basis, n_periods, n_phases)(a, b);
}

inline double time_domain_oracle(const SystemParams& p, const Drive& d, int a, int b, int n_periods, int n_phases) {
  return time_domain_oracle(p, d, a, b, n_periods, n_phases, model::product_eigenbasis(p));
}

/// Full numerical route for one parameter point: modes plus transition table
/// in the exact uncoupled eigenbasis.
struct FloquetPoint {
  FloquetSolution solution;
  TransitionTable table;
};

inline FloquetPoint solve_point(const SystemParams& p, const Drive& d, const FloquetOptions& opt = {}) {
  FloquetPoint out{floquet_modes(p, d, opt), {}};
  out.table = s_matrix(out.solution, model::product_eigenbasis(p));
  return out;
}

}  // namespace spectroscope::floquet
