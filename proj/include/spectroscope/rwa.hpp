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

#include <cfenv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spectroscope/errors.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/numerics/bessel.hpp"

namespace spectroscope::rwa {

using model::Drive;
using model::SystemParams;

/// Nearest multiphoton resonance: value + K omega = delta.
struct Detuning {
  long k = 0;
  double delta = 0.0;
};

/// K = -round(value / omega) with exact half-integer ties going to the even
/// integer; delta then lies in [-omega/2, omega/2] (the upper end only at a tie).
inline Detuning detuning(double value, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("detuning: omega must be > 0");
  if (!std::isfinite(value)) throw std::invalid_argument("detuning: non-finite value");
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(value / omega);
  std::fesetround(saved);
  Detuning out;
  out.k = -static_cast<long>(r);
  out.delta = value + static_cast<double>(out.k) * omega;
  return out;
}

/// Same as detuning() but ties go to the smaller |K|.
inline Detuning detuning_small_k(double value, double omega) {
  Detuning out = detuning(value, omega);
  const double frac = value / omega - std::floor(value / omega);
  if (frac == 0.5) {
    const long a = -static_cast<long>(std::floor(value / omega));
    const long b = a - 1;
    out.k = std::labs(a) <= std::labs(b) ? a : b;
    out.delta = value + static_cast<double>(out.k) * omega;
  }
  return out;
}

enum class Channel {
  ToState2,  // second qubit flips, resonance at eps2 + g = n omega
  ToState3,  // first qubit flips, resonance at eps1 + g = n omega
  ToState4,  // both flip, resonance at eps1 + eps2 = n omega
};

inline std::string to_string(Channel c) {
  switch (c) {
    case Channel::ToState2: return "1->2";
    case Channel::ToState3: return "1->3";
    case Channel::ToState4: return "1->4";
  }
  return "?";
}

/// Effective Rabi frequency of a single-flip channel at its nearest resonance.
inline double rabi_two_level(Channel c, const SystemParams& p, const Drive& d) {
  if (!d.equal_amplitudes()) throw std::invalid_argument("rabi_two_level: unequal drive amplitudes");
  const double z = d.amplitude / d.omega;
  switch (c) {
    case Channel::ToState2: return 0.5 * p.delta2 * numerics::bessel_j(static_cast<int>(detuning(p.eps2 + p.g, d.omega).k), z);
    case Channel::ToState3: return 0.5 * p.delta1 * numerics::bessel_j(static_cast<int>(detuning(p.eps1 + p.g, d.omega).k), z);
    case Channel::ToState4: break;
  }
  throw std::invalid_argument("rabi_two_level: use rabi_inverse_channel for the double flip");
}

/// Second-order coupling and shift of the double-flip channel.
struct InverseChannel {
  double omega0 = 0.0;  // effective Rabi frequency
  double delta0 = 0.0;  // shift of the resonance centre
};

/// Sums run over |k| <= k_max; k12 is the photon number of the resonance
/// eps1 + eps2 + k12 omega ~ 0.
inline InverseChannel rabi_inverse_channel(const SystemParams& p, const Drive& d, long k12, int k_max) {
  if (!d.equal_amplitudes()) throw std::invalid_argument("rabi_inverse_channel: unequal drive amplitudes");
  if (k_max < 1) throw std::invalid_argument("rabi_inverse_channel: k_max must be >= 1");
  const double w = d.omega;
  const long reach = std::labs(k12) + k_max;
  const numerics::BesselTable J(static_cast<int>(reach), d.amplitude / w);
  const double g2 = p.g * p.g;

  auto inv = [&](double eps, int q, int k) {
    const double den = (eps + k * w) * (eps + k * w) - g2;
    if (std::abs(den) < 1e-9) throw ResonanceError(q, +1, k, den);
    return 1.0 / den;
  };

  double shift = 0.0, coupling = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const double i1 = inv(p.eps1, 1, k), i2 = inv(p.eps2, 2, k);
    const double jk = J.at(k);
    shift += jk * jk * (p.delta1 * p.delta1 * (p.eps1 + k * w) * i1 + p.delta2 * p.delta2 * (p.eps2 + k * w) * i2);
    coupling += jk * J.at(static_cast<int>(k12 - k)) * (i1 + i2);
  }
  return {0.25 * p.g * p.delta1 * p.delta2 * coupling, -0.5 * shift};
}

/// A channel evaluated at one parameter point.
struct ResonantChannel {
  Channel channel = Channel::ToState2;
  long k = 0;           // photon number
  double delta = 0.0;   // detuning from the nearest resonance
  double omega0 = 0.0;  // effective Rabi frequency
  double delta0 = 0.0;  // centre shift (double flip only)
};

inline ResonantChannel resonant_channel(Channel c, const SystemParams& p, const Drive& d, int k_max) {
  ResonantChannel out;
  out.channel = c;
  Detuning det;
  switch (c) {
    case Channel::ToState2: det = detuning(p.eps2 + p.g, d.omega); break;
    case Channel::ToState3: det = detuning(p.eps1 + p.g, d.omega); break;
    case Channel::ToState4: det = detuning_small_k(p.eps1 + p.eps2, d.omega); break;
  }
  out.k = det.k;
  out.delta = det.delta;
  if (c == Channel::ToState4) {
    const auto ic = rabi_inverse_channel(p, d, det.k, k_max);
    out.omega0 = ic.omega0;
    out.delta0 = ic.delta0;
  } else {
    out.omega0 = rabi_two_level(c, p, d);
  }
  return out;
}

/// Time-averaged transfer probability near one resonance as a function of the
/// detuning: 1/2 / (1 + ((delta - delta0) / (2 Omega0))^2). A channel with
/// zero coupling gives the zero profile.
class LorentzianProfile {
 public:
  LorentzianProfile(double omega0, double delta0) : omega0_(omega0), delta0_(delta0) {}
  explicit LorentzianProfile(const ResonantChannel& c) : LorentzianProfile(c.omega0, c.delta0) {}

  bool is_zero() const noexcept { return omega0_ == 0.0; }
  double center() const noexcept { return delta0_; }
  double hwhm() const noexcept { return 2.0 * std::abs(omega0_); }
  double peak() const noexcept { return is_zero() ? 0.0 : 0.5; }

  double operator()(double delta) const {
    if (is_zero()) return 0.0;
    const double x = (delta - delta0_) / (2.0 * omega0_);
    return 0.5 / (1.0 + x * x);
  }

 private:
  double omega0_;
  double delta0_;
};

inline LorentzianProfile lorentzian_profile(const ResonantChannel& c) { return LorentzianProfile(c); }

}  // namespace spectroscope::rwa
