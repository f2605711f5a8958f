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
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spectroscope/errors.hpp"
#include "spectroscope/numerics/linalg.hpp"

namespace spectroscope::numerics {

/// Embedded Dormand-Prince 5(4) integrator with FSAL reuse.
///
/// Error control is per unit step: a step of length h is accepted when its
/// local error estimate is below tol * h / span, so the accumulated error
/// over the whole span stays of order tol. `State` is any Eigen dense type.
template <class State>
class DormandPrince {
 public:
  DormandPrince(double tol, double span) : tol_(tol), span_(std::abs(span)) {
    if (!(tol > 0.0)) throw std::invalid_argument("DormandPrince: tol must be > 0");
    if (!(span_ > 0.0)) span_ = 1.0;
  }

  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  /// Advance y from t0 to t1 (t1 >= t0). The last accepted step size and the
  /// FSAL derivative are carried over between consecutive calls.
  template <class Rhs>
  void advance(Rhs&& rhs, State& y, double t0, double t1) {
    if (t1 < t0) throw std::invalid_argument("DormandPrince: t1 < t0");
    if (t1 == t0) return;
    double t = t0;
    if (h_ <= 0.0) h_ = initial_step(rhs, y, t0, t1 - t0);
    if (!fsal_valid_ || fsal_time_ != t) {
      k1_ = rhs(t, y);
      fsal_valid_ = true;
    }
    while (t < t1) {
      double h = std::min(h_, t1 - t);
      const bool last = (t + h >= t1);
      if (last) h = t1 - t;

      const State k2 = rhs(t + kC2 * h, State(y + h * (kA21 * k1_)));
      const State k3 = rhs(t + kC3 * h, State(y + h * (kA31 * k1_ + kA32 * k2)));
      const State k4 = rhs(t + kC4 * h, State(y + h * (kA41 * k1_ + kA42 * k2 + kA43 * k3)));
      const State k5 =
          rhs(t + kC5 * h, State(y + h * (kA51 * k1_ + kA52 * k2 + kA53 * k3 + kA54 * k4)));
      const State k6 = rhs(
          t + h, State(y + h * (kA61 * k1_ + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5)));
      const State y_new =
          y + h * (kB1 * k1_ + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      const State k7 = rhs(t + h, y_new);
      const State err_vec =
          h * (kE1 * k1_ + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
      const double err = err_vec.cwiseAbs().maxCoeff();
      const double allowed = tol_ * h / span_;

      if (err <= allowed) {
        y = y_new;
        k1_ = k7;
        t = last ? t1 : t + h;
        ++accepted_;
        achieved_ = std::max(achieved_, err);
        const double factor =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(allowed / err, 0.25), 0.2, 5.0);
        // A step truncated to hit t1 says little about the natural step size.
        if (!last || h >= h_) h_ = h * factor;
      } else {
        ++rejected_;
        const double factor =
            std::isfinite(err) ? std::clamp(0.9 * std::pow(allowed / err, 0.25), 0.1, 0.9) : 0.1;
        h_ = h * factor;
        const double h_min = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h_ < h_min) throw ConvergenceError("DormandPrince: step size underflow", t, err);
      }
    }
    fsal_time_ = t1;
  }

 private:
  template <class Rhs>
  double initial_step(Rhs& rhs, const State& y, double t0, double interval) {
    const State f0 = rhs(t0, y);
    const double scale = std::max(f0.cwiseAbs().maxCoeff(), 1e-12);
    // Local error of order (h*|f|)^5 against a budget of tol*h/span.
    double h = 0.5 * std::pow(tol_ / span_, 0.25) / scale;
    return std::min({h, interval, span_ / 8.0});
  }

  static constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
  static constexpr double kA21 = 1.0 / 5.0;
  static constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
  static constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
  static constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                          kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
  static constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                          kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                          kA65 = -5103.0 / 18656.0;
  static constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                          kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
  static constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                          kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

  double tol_;
  double span_;
  double h_ = 0.0;
  State k1_;
  bool fsal_valid_ = false;
  double fsal_time_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  double achieved_ = 0.0;
};

inline void check_tolerance(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6))
    throw std::invalid_argument("propagation tolerance must lie in [1e-13, 1e-6]");
}

/// Solve i dU/dt = H(t) U from U(t0) = u0 to t1.
template <class Matrix, class Hamiltonian>
Matrix propagate(Hamiltonian&& h, const Matrix& u0, double t0, double t1, double tol) {
  check_tolerance(tol);
  if (t1 == t0) return u0;
  const double sign = t1 > t0 ? 1.0 : -1.0;
  auto rhs = [&](double s, const Matrix& u) -> Matrix {
    const double t = t0 + sign * (s - t0);
    return Matrix(-kI * sign * (h(t) * u));
  };
  Matrix u = u0;
  DormandPrince<Matrix> stepper(tol, std::abs(t1 - t0));
  stepper.advance(rhs, u, t0, t0 + std::abs(t1 - t0));
  return u;
}

/// U(t_j, times[0]) at every sample of an ascending time list, from u0.
template <class Matrix, class Hamiltonian>
std::vector<Matrix> propagate_on_grid(Hamiltonian&& h, const Matrix& u0, std::span<const double> times,
                                      double tol) {
  check_tolerance(tol);
  std::vector<Matrix> out;
  if (times.empty()) return out;
  out.reserve(times.size());
  auto rhs = [&](double t, const Matrix& u) -> Matrix { return Matrix(-kI * (h(t) * u)); };
  DormandPrince<Matrix> stepper(tol, times.back() - times.front());
  Matrix u = u0;
  out.push_back(u);
  for (std::size_t j = 1; j < times.size(); ++j) {
    stepper.advance(rhs, u, times[j - 1], times[j]);
    out.push_back(u);
  }
  return out;
}

}  // namespace spectroscope::numerics
