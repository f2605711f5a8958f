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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectroscope/errors.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/numerics/fourier.hpp"
#include "spectroscope/numerics/ode.hpp"

namespace spectroscope::dissipation {

using model::Drive;
using model::SystemParams;
using numerics::Basis4;
using numerics::Complex;
using numerics::Matrix4c;
using numerics::TimeGrid;

using Superoperator = Eigen::Matrix<Complex, 16, 16>;
using VecRho = Eigen::Matrix<Complex, 16, 1>;

/// Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho).
inline VecRho vectorize(const Matrix4c& rho) { return Eigen::Map<const VecRho>(rho.data()); }
inline Matrix4c unvectorize(const VecRho& v) { return Eigen::Map<const Matrix4c>(v.data()); }

inline Superoperator kron(const Matrix4c& a, const Matrix4c& b) {
  Superoperator out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

/// Boltzmann over Planck constant in GHz per kelvin. Bath temperatures are
/// expressed in the same (cyclic) frequency unit as the energies.
inline constexpr double kGhzPerKelvin = 1.380649e-23 / 6.62607015e-34 * 1e-9;

inline double bath_temperature(double kelvin) {
  if (!(kelvin >= 0.0)) throw std::invalid_argument("bath_temperature: temperature must be >= 0");
  return kGhzPerKelvin * kelvin;
}

/// Detailed-balance excitation rate Gamma' = Gamma exp(-gap / tau_B).
inline double excitation_rate(double gamma_down, double gap, double tau_b) {
  if (!(tau_b > 0.0)) throw std::invalid_argument("excitation_rate: tau_B must be > 0 (set Gamma' = 0 for zero temperature)");
  return gamma_down * std::exp(-gap / tau_b);
}

/// Per-qubit dephasing, relaxation and excitation rates (index 0 is qubit 1).
struct Rates {
  std::array<double, 2> gamma_phi{};
  std::array<double, 2> gamma_down{};
  std::array<double, 2> gamma_up{};
  std::optional<double> tau_b;

  /// Excitation rates from detailed balance at bath temperature tau_b.
  static Rates thermal(const SystemParams& p, std::array<double, 2> gamma_down, std::array<double, 2> gamma_phi,
                       double tau_b) {
    Rates r;
    r.gamma_phi = gamma_phi;
    r.gamma_down = gamma_down;
    r.tau_b = tau_b;
    r.gamma_up[0] = excitation_rate(gamma_down[0], model::single_qubit_eigenbasis(p.eps1, p.delta1).gap, tau_b);
    r.gamma_up[1] = excitation_rate(gamma_down[1], model::single_qubit_eigenbasis(p.eps2, p.delta2).gap, tau_b);
    return r;
  }

  void validate() const {
    for (int q = 0; q < 2; ++q) {
      const auto i = static_cast<std::size_t>(q);
      if (!(gamma_phi[i] >= 0.0 && gamma_down[i] >= 0.0 && gamma_up[i] >= 0.0))
        throw std::invalid_argument("Rates: all rates must be >= 0");
    }
  }
  bool has_relaxation() const { return gamma_down[0] > 0.0 || gamma_down[1] > 0.0; }
};

/// sigma_z, sigma_+ and sigma_- of each qubit in its own static eigenbasis,
/// embedded in the two-qubit space.
struct LindbladOperators {
  std::array<Matrix4c, 2> sz;
  std::array<Matrix4c, 2> sp;
  std::array<Matrix4c, 2> sm;
};

inline LindbladOperators lindblad_operators(const SystemParams& p) {
  LindbladOperators out;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  auto embed = [&](int q, const Eigen::Matrix2cd& op) {
    Matrix4c m;
    // Basis index i = 2*i1 + i2.
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        m(i, j) = q == 1 ? op(i >> 1, j >> 1) * id(i & 1, j & 1) : id(i >> 1, j >> 1) * op(i & 1, j & 1);
    return m;
  };
  for (int q = 1; q <= 2; ++q) {
    const auto b = q == 1 ? model::single_qubit_eigenbasis(p.eps1, p.delta1)
                          : model::single_qubit_eigenbasis(p.eps2, p.delta2);
    const Eigen::Vector2cd dn = b.down.cast<Complex>(), up = b.up.cast<Complex>();
    const auto i = static_cast<std::size_t>(q - 1);
    out.sz[i] = embed(q, up * up.adjoint() - dn * dn.adjoint());
    out.sp[i] = embed(q, up * dn.adjoint());
    out.sm[i] = embed(q, dn * up.adjoint());
  }
  return out;
}

/// D[a] rho = a rho a^dagger - {a^dagger a, rho}/2 as a superoperator.
inline Superoperator dissipator(const Matrix4c& a) {
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c ada = a.adjoint() * a;
  return kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id);
}

/// Generator L(t) = L0 + cos(omega t - phi0) Lv of the master equation.
class Liouvillian {
 public:
  Liouvillian(const SystemParams& p, const Drive& d, const Rates& rates) : drive_(d) {
    rates.validate();
    const model::DrivenHamiltonian h(p, d);
    const Matrix4c id = Matrix4c::Identity();
    auto commutator = [&](const Matrix4c& hm) -> Superoperator {
      return -numerics::kI * (kron(id, hm) - kron(hm.transpose(), id));
    };
    Matrix4c hv = Matrix4c::Zero();
    for (int i = 0; i < 4; ++i) hv(i, i) = h.drive_diagonal()[static_cast<std::size_t>(i)];
    l0_ = commutator(h.static_part());
    lv_ = commutator(hv);
    const auto ops = lindblad_operators(p);
    for (std::size_t q = 0; q < 2; ++q) {
      if (rates.gamma_phi[q] > 0.0) l0_ += rates.gamma_phi[q] * dissipator(ops.sz[q]);
      if (rates.gamma_down[q] > 0.0) l0_ += rates.gamma_down[q] * dissipator(ops.sm[q]);
      if (rates.gamma_up[q] > 0.0) l0_ += rates.gamma_up[q] * dissipator(ops.sp[q]);
    }
  }

  Superoperator at(double t) const { return l0_ + std::cos(drive_.omega * t - drive_.phi0) * lv_; }
  const Superoperator& static_part() const noexcept { return l0_; }
  const Drive& drive() const noexcept { return drive_; }

  template <class State>
  State apply(double t, const State& x) const {
    const double c = std::cos(drive_.omega * t - drive_.phi0);
    return State(l0_ * x + c * (lv_ * x));
  }

 private:
  Drive drive_;
  Superoperator l0_;
  Superoperator lv_;
};

inline double trace_error(const Matrix4c& rho) { return std::abs(rho.trace() - 1.0); }

inline double min_eigenvalue(const Matrix4c& rho) {
  const Matrix4c herm = 0.5 * (rho + rho.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix4c>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

inline constexpr double kPositivityAbort = 1e-6;

/// rho(t1) from rho(t0) under the master equation.
inline Matrix4c evolve_master(const SystemParams& p, const Drive& d, const Rates& rates, const Matrix4c& rho0,
                              double t0, double t1, double tol) {
  numerics::check_tolerance(tol);
  if (t1 < t0) throw std::invalid_argument("evolve_master: t1 < t0");
  const Liouvillian l(p, d, rates);
  VecRho x = vectorize(rho0);
  numerics::DormandPrince<VecRho> stepper(tol, t1 - t0);
  stepper.advance([&](double t, const VecRho& v) { return l.apply(t, v); }, x, t0, t1);
  const Matrix4c rho = unvectorize(x);
  const double lam = min_eigenvalue(rho);
  if (lam < -kPositivityAbort) throw PositivityError(lam, t1);
  return rho;
}

/// Propagator of the vectorized density matrix over [t0, t0 + T].
inline Superoperator one_period_map(const Liouvillian& l, double t0, double tol) {
  numerics::check_tolerance(tol);
  const double period = l.drive().period();
  Superoperator phi = Superoperator::Identity();
  numerics::DormandPrince<Superoperator> stepper(tol, period);
  stepper.advance([&](double t, const Superoperator& x) { return l.apply(t, x); }, phi, t0, t0 + period);
  return phi;
}

enum class SteadyStateMethod { Eigenvector, Iteration };

struct SteadyStateOptions {
  double tol = 1e-10;
  int n_samples = 256;
  SteadyStateMethod method = SteadyStateMethod::Eigenvector;
  long max_periods = 1000000;  // budget for the iteration method
};

/// Density matrix sampled on one period grid, with health diagnostics.
struct PeriodicState {
  TimeGrid grid{1.0, 4};
  std::vector<Matrix4c> rho;
  double residual = 0.0;          // ||rho(T) - rho(0)||_1 after one period
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

namespace detail {

inline double trace_norm_of_difference(const Matrix4c& a, const Matrix4c& b) {
  const Matrix4c diff = 0.5 * ((a - b) + (a - b).adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix4c>(diff, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().sum();
}

inline Matrix4c normalized(const Matrix4c& rho) {
  Matrix4c r = 0.5 * (rho + rho.adjoint());
  return r / r.trace().real();
}

// Samples rho on the grid starting from rho at t = 0, plus the value at T.
inline PeriodicState sample_period(const Liouvillian& l, const Matrix4c& rho0, const SteadyStateOptions& opt) {
  PeriodicState st;
  st.grid = TimeGrid(l.drive().omega, opt.n_samples);
  const auto times = st.grid.times_with_endpoint();
  numerics::DormandPrince<VecRho> stepper(opt.tol, st.grid.period());
  VecRho x = vectorize(rho0);
  auto rhs = [&](double t, const VecRho& v) { return l.apply(t, v); };
  st.rho.reserve(times.size() - 1);
  st.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (j > 0) stepper.advance(rhs, x, times[j - 1], times[j]);
    const Matrix4c rho = unvectorize(x);
    if (j + 1 == times.size()) {
      st.residual = trace_norm_of_difference(rho, rho0);
      break;
    }
    st.max_trace_error = std::max(st.max_trace_error, trace_error(rho));
    st.max_hermiticity_error = std::max(st.max_hermiticity_error, numerics::hermiticity_defect(rho));
    const double lam = min_eigenvalue(rho);
    st.min_eigenvalue = std::min(st.min_eigenvalue, lam);
    if (lam < -kPositivityAbort) throw PositivityError(lam, times[j]);
    st.rho.push_back(rho);
  }
  return st;
}

}  // namespace detail

/// Fixed point of the one-period map: the eigenvector of eigenvalue closest
/// to 1, or (Iteration) repeated application until successive periods agree
/// to tol in trace norm.
inline Matrix4c steady_state_at_zero(const Liouvillian& l, const Rates& rates, const SteadyStateOptions& opt) {
  if (!rates.has_relaxation())
    throw std::invalid_argument("periodic_steady_state: needs a nonzero relaxation rate for uniqueness");
  const Superoperator phi = one_period_map(l, 0.0, opt.tol);
  if (opt.method == SteadyStateMethod::Eigenvector) {
    Eigen::ComplexEigenSolver<Superoperator> es(phi);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < 16; ++i)
      if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
    return detail::normalized(unvectorize(es.eigenvectors().col(best)));
  }
  Matrix4c rho = Matrix4c::Identity() / 4.0;
  for (long n = 0; n < opt.max_periods; ++n) {
    const Matrix4c next = detail::normalized(unvectorize(phi * vectorize(rho)));
    const double change = detail::trace_norm_of_difference(next, rho);
    rho = next;
    if (change < opt.tol) return rho;
  }
  throw ConvergenceError("periodic_steady_state: iteration budget exhausted", 0.0,
                         detail::trace_norm_of_difference(unvectorize(phi * vectorize(rho)), rho));
}

/// Periodic solution rho_T(t) on the sample grid of one period.
inline PeriodicState periodic_steady_state(const SystemParams& p, const Drive& d, const Rates& rates,
                                           const SteadyStateOptions& opt = {}) {
  const Liouvillian l(p, d, rates);
  return detail::sample_period(l, steady_state_at_zero(l, rates, opt), opt);
}

/// Transient alternative: start from the pure state `initial` at t = 0 and
/// sample the period that begins at the last whole period before tau.
inline PeriodicState transient_state(const SystemParams& p, const Drive& d, const Rates& rates,
                                     const numerics::Vector4c& initial, double tau,
                                     const SteadyStateOptions& opt = {}) {
  if (!(tau >= 0.0)) throw std::invalid_argument("transient_state: tau must be >= 0");
  const Liouvillian l(p, d, rates);
  const Superoperator phi = one_period_map(l, 0.0, opt.tol);
  const long periods = static_cast<long>(std::floor(tau / d.period()));
  VecRho x = vectorize(initial * initial.adjoint());
  for (long n = 0; n < periods; ++n) x = phi * x;
  return detail::sample_period(l, unvectorize(x), opt);
}

/// Pulse duration 1/sqrt(Gamma Gamma_phi) of one qubit.
inline double pulse_duration(const Rates& rates, int qubit) {
  const auto i = static_cast<std::size_t>(qubit - 1);
  const double prod = rates.gamma_down.at(i) * rates.gamma_phi.at(i);
  if (!(prod > 0.0)) throw std::invalid_argument("pulse_duration: needs nonzero relaxation and dephasing");
  return 1.0 / std::sqrt(prod);
}

/// Period averages of <beta| rho(t) |beta> on the grid.
inline std::array<double, 4> averaged_probabilities_dissipative(const PeriodicState& st, const Basis4& basis) {
  std::array<double, 4> out{};
  for (const auto& rho : st.rho)
    for (std::size_t b = 0; b < 4; ++b) out[b] += basis[b].dot(rho * basis[b]).real();
  for (double& x : out) x /= static_cast<double>(st.rho.size());
  return out;
}

/// Wootters concurrence.
inline double concurrence(const Matrix4c& rho) {
  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Matrix4c tilde = yy * rho.conjugate() * yy;
  const Eigen::Vector4cd ev = Eigen::ComplexEigenSolver<Matrix4c>(rho * tilde, false).eigenvalues();
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, ev(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double averaged_concurrence(const PeriodicState& st) {
  double acc = 0.0;
  for (const auto& rho : st.rho) acc += concurrence(rho);
  return acc / static_cast<double>(st.rho.size());
}

}  // namespace spectroscope::dissipation
