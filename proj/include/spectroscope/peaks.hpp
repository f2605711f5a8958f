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
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spectroscope::peaks {

/// Golden-section search for the maximum of f on [a, b].
template <class F>
double golden_maximum(F&& f, double a, double b, double tol) {
  if (a > b) std::swap(a, b);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

/// Location, height and half width at half maximum of one peak.
struct Peak {
  double center = std::numeric_limits<double>::quiet_NaN();
  double height = std::numeric_limits<double>::quiet_NaN();
  double left = std::numeric_limits<double>::quiet_NaN();   // half-maximum crossing below center
  double right = std::numeric_limits<double>::quiet_NaN();  // half-maximum crossing above center
  double hwhm = std::numeric_limits<double>::quiet_NaN();
};

struct MeasureOptions {
  int scan_points = 41;    // odd, centred on the refined maximum
  double scan_halfwidths = 5.0;
  double search_halfwidths = 2.0;  // golden-section bracket around the guess
};

/// Fit-free peak measurement: refine the maximum near `guess`, then scan
/// scan_points samples across +-scan_halfwidths * hwhm_estimate and locate the
/// half-maximum crossings by linear interpolation. Sides without a crossing
/// inside the scan leave NaN.
template <class F>
Peak measure_peak(F&& f, double guess, double hwhm_estimate, const MeasureOptions& opt = {}) {
  if (!(hwhm_estimate > 0.0)) throw std::invalid_argument("measure_peak: hwhm estimate must be > 0");
  if (opt.scan_points < 5 || opt.scan_points % 2 == 0)
    throw std::invalid_argument("measure_peak: scan_points must be odd and >= 5");
  Peak pk;
  const double reach = opt.search_halfwidths * hwhm_estimate;
  pk.center = golden_maximum(f, guess - reach, guess + reach, 1e-4 * hwhm_estimate);
  pk.height = f(pk.center);
  const double half = 0.5 * pk.height;

  const int n = opt.scan_points, mid = n / 2;
  const double step = opt.scan_halfwidths * hwhm_estimate / mid;
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = pk.center + (i - mid) * step;
    ys[static_cast<std::size_t>(i)] = i == mid ? pk.height : f(xs[static_cast<std::size_t>(i)]);
  }
  auto cross = [&](std::size_t inner, std::size_t outer) {
    const double t = (ys[inner] - half) / (ys[inner] - ys[outer]);
    return xs[inner] + t * (xs[outer] - xs[inner]);
  };
  for (int i = mid; i > 0; --i)
    if (ys[static_cast<std::size_t>(i - 1)] < half) {
      pk.left = cross(static_cast<std::size_t>(i), static_cast<std::size_t>(i - 1));
      break;
    }
  for (int i = mid; i < n - 1; ++i)
    if (ys[static_cast<std::size_t>(i + 1)] < half) {
      pk.right = cross(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1));
      break;
    }
  pk.hwhm = 0.5 * (pk.right - pk.left);
  return pk;
}

/// Indices of strict interior local maxima of ys not below min_height.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& ys, double min_height) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < ys.size(); ++i)
    if (ys[i] >= min_height && ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]) out.push_back(i);
  return out;
}

}  // namespace spectroscope::peaks
