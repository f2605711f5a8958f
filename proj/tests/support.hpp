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
#include <limits>
#include <stdexcept>

#include "spectroscope/floquet.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/peaks.hpp"
#include "spectroscope/perturbation.hpp"
#include "spectroscope/rwa.hpp"

namespace spectroscope::testing {

/// Qubit pair with eps2 = ratio * eps1, the arrangement used throughout the
/// resonance tests.
struct LinkedPair {
  double delta1 = 0.1;
  double delta2 = 0.15;
  double g = 0.15;
  double ratio = 2.0;

  model::SystemParams at(double eps1) const { return {eps1, ratio * eps1, delta1, delta2, g}; }
};

inline model::Drive standard_drive() { return {5.0, 1.0, 0.0}; }

/// Averaged probability 1 -> b (b = 1..3 is the zero-based final index) from
/// the Floquet route.
inline double pbar(const model::SystemParams& p, const model::Drive& d, int b) {
  return floquet::solve_point(p, d).table.pbar(0, b);
}

/// Signed distance from the double-flip resonance, measured on the Floquet
/// spectrum: folded quasienergy splitting of the modes dominated by states 1
/// and 4, times the population imbalance of the first. It changes sign where
/// the two states are maximally mixed.
inline double inverse_detuning(const model::SystemParams& p, const model::Drive& d) {
  const auto pt = floquet::solve_point(p, d);
  const auto& s = pt.table.s;
  const double split = model::fold_to_zone(pt.solution.gammas[3] - pt.solution.gammas[0], d.omega);
  return split * (s(0, 0) - s(0, 3));
}

/// Root of inverse_detuning in eps1 between lo and hi (bisection).
inline double inverse_resonance_center(const LinkedPair& pair, const model::Drive& d, double lo, double hi,
                                       double tol = 1e-9) {
  double flo = inverse_detuning(pair.at(lo), d);
  double fhi = inverse_detuning(pair.at(hi), d);
  if (flo * fhi > 0.0) throw std::runtime_error("inverse_resonance_center: no sign change in bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = inverse_detuning(pair.at(mid), d);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}


/// Smallest distance, in units of the line's own half width, from eps1 to a
/// resonance line of the linked sweep that involves the ground state or the
/// single-flip partners feeding the double flip. Half widths come from the
/// resonant closed forms (converted from detuning to eps1 units).
inline double resonance_clearance(const LinkedPair& pair, const model::Drive& d, double eps1) {
  using perturbation::ResonanceKind;
  perturbation::ParameterFamily fam;
  fam.base = pair.at(0.0);
  fam.slope_x = {1.0, pair.ratio, 0.0, 0.0, 0.0};
  const auto lines = perturbation::resonance_catalog(fam, d, eps1 - 2.0, eps1 + 2.0);
  const double z = d.amplitude / d.omega;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : lines) {
    const double j = std::abs(numerics::bessel_j(static_cast<int>(e.n), z));
    double hwhm = 0.0;
    switch (e.kind) {
      case ResonanceKind::Eps1PlusG:
      case ResonanceKind::Eps1MinusG: hwhm = pair.delta1 * j; break;
      case ResonanceKind::Eps2PlusG:
      case ResonanceKind::Eps2MinusG: hwhm = pair.delta2 * j / pair.ratio; break;
      case ResonanceKind::Eps1PlusEps2: {
        const auto ch = rwa::resonant_channel(rwa::Channel::ToState4, pair.at(e.location), d, floquet::default_k_max(d));
        hwhm = 2.0 * std::abs(ch.omega0) / (1.0 + pair.ratio);
        break;
      }
      case ResonanceKind::Eps1MinusEps2: continue;  // does not touch the ground state at this order
    }
    if (hwhm <= 0.0) continue;
    best = std::min(best, std::abs(eps1 - e.location) / hwhm);
  }
  return best;
}

}  // namespace spectroscope::testing
