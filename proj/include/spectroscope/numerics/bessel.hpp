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

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace spectroscope::numerics {

namespace detail {

// Starting order for the downward recurrence: far enough above both n and x
// that the truncation error is below double precision.
inline int miller_start(int n_max, double x) {
  const double top = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(top + 20.0 + 2.0 * std::ceil(std::sqrt(40.0 * (top + 1.0))));
  return start + (start & 1);  // even, so the J_0 + 2*sum(J_2k) sum closes
}

// log of the leading series term (x/2)^n / n!, an upper bound on |J_n(x)|
// for n >= 0, x >= 0.
inline double log_leading_term(int n, double x) {
  return n * std::log(0.5 * x) - std::lgamma(n + 1.0);
}

}  // namespace detail

/// J_0(x) .. J_{n_max}(x) for x >= 0 by Miller's backward recurrence with the
/// Neumann normalization J_0 + 2 sum_k J_2k = 1.
inline std::vector<double> bessel_j_table(int n_max, double x) {
  if (n_max < 0) throw std::invalid_argument("bessel_j_table: n_max must be >= 0");
  if (x < 0.0) throw std::invalid_argument("bessel_j_table: x must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int start = detail::miller_start(n_max, x);
  constexpr double kBig = 1e250;
  double next = 0.0;   // J_{m+1}
  double cur = 1e-300; // J_m, arbitrary seed
  double norm = 0.0;
  for (int m = start; m >= 0; --m) {
    if (m <= n_max) out[static_cast<std::size_t>(m)] = cur;
    if (m == 0) {
      norm += cur;
    } else if ((m & 1) == 0) {
      norm += 2.0 * cur;
    }
    if (m == 0) break;
    const double prev = (2.0 * m / x) * cur - next;  // J_{m-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      next /= kBig;
      norm /= kBig;
      for (int j = m; j <= n_max; ++j) out[static_cast<std::size_t>(j)] /= kBig;
    }
  }
  for (double& v : out) v /= norm;
  return out;
}

/// Bessel function of the first kind J_n(x) for integer order.
inline double bessel_j(int n, double x) {
  if (std::abs(n) > 1'000'000) throw std::invalid_argument("bessel_j: |n| > 1e6");
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n & 1) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n & 1) sign = -sign;
  }
  if (x == 0.0) return n == 0 ? sign : 0.0;
  if (n > x && detail::log_leading_term(n, x) < -745.0) return 0.0;
  return sign * bessel_j_table(n, x)[static_cast<std::size_t>(n)];
}

/// Symmetric table J_k(x) for k in [-k_max, k_max]; index with at(k).
class BesselTable {
 public:
  BesselTable(int k_max, double x) : k_max_(k_max), x_(x) {
    if (k_max < 0) throw std::invalid_argument("BesselTable: k_max must be >= 0");
    const double ax = std::abs(x);
    positive_ = bessel_j_table(k_max, ax);
    if (x < 0.0) {
      for (int k = 1; k <= k_max; k += 2) positive_[static_cast<std::size_t>(k)] = -positive_[static_cast<std::size_t>(k)];
    }
  }

  int k_max() const noexcept { return k_max_; }
  double argument() const noexcept { return x_; }

  /// J_k(x); zero outside the tabulated range.
  double at(int k) const noexcept {
    const int ak = k < 0 ? -k : k;
    if (ak > k_max_) return 0.0;
    const double v = positive_[static_cast<std::size_t>(ak)];
    return (k < 0 && (ak & 1)) ? -v : v;
  }

 private:
  int k_max_;
  double x_;
  std::vector<double> positive_;
};

}  // namespace spectroscope::numerics
