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
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "spectroscope/numerics/linalg.hpp"

namespace spectroscope::numerics {

/// Uniform samples t_j = j T / N, j = 0..N-1, of one drive period.
class TimeGrid {
 public:
  TimeGrid(double omega, int n_samples) : omega_(omega), n_(n_samples) {
    if (!(omega > 0.0)) throw std::invalid_argument("TimeGrid: omega must be > 0");
    if (n_samples < 4 || (n_samples & (n_samples - 1)) != 0)
      throw std::invalid_argument("TimeGrid: n_samples must be a power of two >= 4");
  }

  /// Smallest admissible grid (at least `minimum`) resolving |k| <= k_max.
  static TimeGrid for_harmonics(double omega, int k_max, int minimum = 1024) {
    int n = 4;
    while (n < minimum || n < 4 * k_max) n *= 2;
    return TimeGrid(omega, n);
  }

  double omega() const noexcept { return omega_; }
  double period() const noexcept { return 2.0 * std::numbers::pi / omega_; }
  int size() const noexcept { return n_; }
  int nyquist() const noexcept { return n_ / 2; }
  double time(int j) const noexcept { return period() * j / n_; }

  /// Sample times plus the closing point T.
  std::vector<double> times_with_endpoint() const {
    std::vector<double> t(static_cast<std::size_t>(n_) + 1);
    for (int j = 0; j <= n_; ++j) t[static_cast<std::size_t>(j)] = time(j);
    return t;
  }

 private:
  double omega_;
  int n_;
};

/// Fourier coefficients c_k = (1/N) sum_j u(t_j) exp(-i k omega t_j) for
/// k_min <= k <= k_max, returned in order of increasing k.
template <class Vector>
std::vector<Vector> fourier_components(std::span<const Vector> samples, const TimeGrid& grid, int k_min,
                                       int k_max) {
  const int n = grid.size();
  if (static_cast<int>(samples.size()) != n)
    throw std::invalid_argument("fourier_components: sample count does not match the grid");
  if (k_min > k_max) throw std::invalid_argument("fourier_components: empty k range");
  if (k_max >= grid.nyquist() || -k_min >= grid.nyquist())
    throw std::invalid_argument("fourier_components: k range exceeds the grid Nyquist limit");

  std::vector<Complex> twiddle(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m)
    twiddle[static_cast<std::size_t>(m)] = std::polar(1.0, -2.0 * std::numbers::pi * m / n);

  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    Vector acc = Vector::Zero(samples[0].size());
    const int step = ((k % n) + n) % n;
    int idx = 0;
    for (int j = 0; j < n; ++j) {
      acc += twiddle[static_cast<std::size_t>(idx)] * samples[static_cast<std::size_t>(j)];
      idx += step;
      if (idx >= n) idx -= n;
    }
    out.push_back(acc / static_cast<double>(n));
  }
  return out;
}

/// Inverse of fourier_components: sum_k c_k exp(i k omega t_j) on the grid.
template <class Vector>
std::vector<Vector> fourier_synthesis(std::span<const Vector> components, const TimeGrid& grid, int k_min) {
  const int n = grid.size();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Vector acc = Vector::Zero(components[0].size());
    for (std::size_t i = 0; i < components.size(); ++i) {
      const long k = k_min + static_cast<long>(i);
      const long m = ((k * j) % n + n) % n;
      acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / n) * components[i];
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace spectroscope::numerics
