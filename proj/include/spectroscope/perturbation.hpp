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
#include <stdexcept>
#include <string>
#include <vector>

#include "spectroscope/errors.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/numerics/bessel.hpp"

namespace spectroscope::perturbation {

using model::Drive;
using model::SystemParams;
using numerics::BesselTable;
using numerics::Vector4c;

/// Denominators closer to zero than this (in units of omega) are treated as
/// resonant and refused by the closed forms.
inline constexpr double kGuardBand = 1e-6;

namespace detail {

inline void require_equal_amplitudes(const Drive& d) {
  if (!d.equal_amplitudes())
    throw std::invalid_argument("perturbative closed forms require equal drive amplitudes");
}

inline void require_nonzero_bias(const SystemParams& p) {
  if (p.eps1 == 0.0 || p.eps2 == 0.0)
    throw std::invalid_argument("perturbative closed forms require eps1, eps2 != 0");
}

// Guarded reciprocal; qubit 0 denotes a two-qubit (eps1 +- eps2) denominator.
inline double inverse(double denominator, double omega, int qubit, int sign, int k) {
  if (std::abs(denominator) < kGuardBand * omega) throw ResonanceError(qubit, sign, k, denominator);
  return 1.0 / denominator;
}

}  // namespace detail

/// Bessel-weighted sums lambda_{qk}^{+-} and chi_{qk}^{+-} of the
/// second-order Floquet expansion, truncated at |k| <= k_max.
class ChiTable {
 public:
  ChiTable(const SystemParams& p, const Drive& d, int k_max)
      : k_max_(k_max), omega_(d.omega), bessel_(3 * k_max + 2, d.amplitude / d.omega) {
    if (k_max < 1) throw std::invalid_argument("ChiTable: k_max must be >= 1");
    detail::require_equal_amplitudes(d);
    const std::size_t width = static_cast<std::size_t>(2 * k_max + 1);
    for (int q = 1; q <= 2; ++q) {
      const double eps = q == 1 ? p.eps1 : p.eps2;
      for (int s : {+1, -1}) {
        auto& lam = lambda_[slot(q, s)];
        auto& chi = chi_[slot(q, s)];
        lam.assign(width, 0.0);
        chi.assign(width, 0.0);
        for (int k = -k_max; k <= k_max; ++k) {
          const double den = s * eps + p.g + k * d.omega;
          lam[index(k)] = bessel_.at(s * k) * 0.5 * detail::inverse(den, d.omega, q, s, k);
          max_lambda_ = std::max(max_lambda_, std::abs(lam[index(k)]));
        }
        for (int k = -k_max; k <= k_max; ++k) {
          double acc = 0.0;
          for (int n = -k_max; n <= k_max; ++n) acc += bessel_.at(s * (n + k)) * lam[index(n)];
          chi[index(k)] = s * acc;
        }
      }
    }
    tail_bound_ = std::abs(bessel_.at(k_max)) * max_lambda_;
  }

  int k_max() const noexcept { return k_max_; }
  double omega() const noexcept { return omega_; }
  const BesselTable& bessel() const noexcept { return bessel_; }

  /// |J_{k_max}(A/omega)| * max |lambda|: size of the first neglected terms.
  double tail_bound() const noexcept { return tail_bound_; }

  double lambda(int q, int sign, int k) const { return lookup(lambda_, q, sign, k); }
  double chi(int q, int sign, int k) const { return lookup(chi_, q, sign, k); }

 private:
  static std::size_t slot(int q, int s) { return static_cast<std::size_t>(2 * (q - 1) + (s > 0 ? 0 : 1)); }
  std::size_t index(int k) const { return static_cast<std::size_t>(k + k_max_); }
  double lookup(const std::array<std::vector<double>, 4>& t, int q, int s, int k) const {
    if (q != 1 && q != 2) throw std::out_of_range("ChiTable: qubit index must be 1 or 2");
    if (k < -k_max_ || k > k_max_) return 0.0;
    return t[slot(q, s)][index(k)];
  }

  int k_max_;
  double omega_;
  BesselTable bessel_;
  std::array<std::vector<double>, 4> lambda_;
  std::array<std::vector<double>, 4> chi_;
  double max_lambda_ = 0.0;
  double tail_bound_ = 0.0;
};

inline ChiTable chi_table(const SystemParams& p, const Drive& d, int k_max) { return ChiTable(p, d, k_max); }

/// Residuals of sum_n lambda_n lambda_{n-m} = +-(chi_m - chi_{-m})/(2 m omega)
/// and of the same identity with chi in place of lambda.
struct IdentityResidual {
  double lambda_form = 0.0;
  double chi_form = 0.0;
};

inline IdentityResidual identity_residual(const ChiTable& t, int q, int sign, int m) {
  if (m == 0) throw std::invalid_argument("identity_residual: m must be nonzero");
  const int k = t.k_max();
  double ll = 0.0, cc = 0.0;
  for (int n = -k; n <= k; ++n) {
    ll += t.lambda(q, sign, n) * t.lambda(q, sign, n - m);
    cc += t.chi(q, sign, n) * t.chi(q, sign, n - m);
  }
  const double rhs = sign * (t.chi(q, sign, m) - t.chi(q, sign, -m)) / (2.0 * m * t.omega());
  return {std::abs(ll - rhs), std::abs(cc - rhs)};
}

/// Second-order quasienergies on the unperturbed branch (not folded).
inline std::array<double, 4> quasienergy_2nd_unfolded(const SystemParams& p, const ChiTable& t) {
  const double d1 = p.delta1 * p.delta1, d2 = p.delta2 * p.delta2;
  const double c1p = t.chi(1, +1, 0), c1m = t.chi(1, -1, 0);
  const double c2p = t.chi(2, +1, 0), c2m = t.chi(2, -1, 0);
  return {-0.5 * (p.eps1 + p.eps2 + p.g) - 0.5 * (d1 * c1p + d2 * c2p),
          -0.5 * (p.eps1 - p.eps2 - p.g) - 0.5 * (d1 * c1m - d2 * c2p),
          0.5 * (p.eps1 - p.eps2 + p.g) + 0.5 * (d1 * c1p - d2 * c2m),
          0.5 * (p.eps1 + p.eps2 - p.g) + 0.5 * (d1 * c1m + d2 * c2m)};
}

/// Second-order quasienergies folded into [-omega/2, omega/2).
inline std::array<double, 4> quasienergy_2nd(const SystemParams& p, const Drive& d, const ChiTable& t) {
  auto g = quasienergy_2nd_unfolded(p, t);
  for (double& x : g) x = model::fold_to_zone(x, d.omega);
  return g;
}

/// Fourier components u_{alpha k}, k in [-k_max, k_max], of the second-order
/// Floquet states on the unperturbed branch. Index [alpha][k + k_max].
using FourierSet = std::array<std::vector<Vector4c>, 4>;

inline FourierSet analytic_fourier_components(const SystemParams& p, const Drive& d, const ChiTable& t) {
  detail::require_nonzero_bias(p);
  const int K = t.k_max();
  const double w = d.omega;
  const auto& J = t.bessel();
  const double d1 = p.delta1, d2 = p.delta2;
  const double d1s = d1 * d1, d2s = d2 * d2, d12 = d1 * d2;
  auto lam = [&](int q, int s, int k) { return t.lambda(q, s, k); };
  auto chi = [&](int q, int s, int k) { return t.chi(q, s, k); };

  // Normalization sums sum_n lambda^2.
  auto lam_sq = [&](int q, int s) {
    double acc = 0.0;
    for (int n = -K; n <= K; ++n) acc += lam(q, s, n) * lam(q, s, n);
    return acc;
  };
  const double l1p = lam_sq(1, +1), l1m = lam_sq(1, -1), l2p = lam_sq(2, +1), l2m = lam_sq(2, -1);

  std::vector<double> pair_inv(static_cast<std::size_t>(2 * K + 1));  // 1/(eps1+eps2+m omega)
  for (int m = -K; m <= K; ++m)
    pair_inv[static_cast<std::size_t>(m + K)] = detail::inverse(p.eps1 + p.eps2 + m * w, w, 0, +1, m);

  FourierSet out;
  for (auto& v : out) v.assign(static_cast<std::size_t>(2 * K + 1), Vector4c::Zero());

  for (int k = -K; k <= K; ++k) {
    const auto ki = static_cast<std::size_t>(k + K);

    // alpha = 1
    {
      double c1 = J.at(k) * (1.0 - 0.5 * (d1s * l1p + d2s * l2p));
      double c4 = 0.0;
      for (int m = -K; m <= K; ++m) {
        if (m != 0) c1 += 0.5 * J.at(k - m) * (d1s * chi(1, +1, -m) + d2s * chi(2, +1, -m)) / (m * w);
        const double jm = J.at(m - k) * pair_inv[static_cast<std::size_t>(m + K)];
        for (int n = -K; n <= K; ++n) c4 += (lam(1, +1, n) + lam(2, +1, n)) * jm * J.at(m - n);
      }
      out[0][ki] << c1, d2 * lam(2, +1, k), d1 * lam(1, +1, k), 0.5 * d12 * c4;
    }
    // alpha = 2
    {
      const double c2 = (k == 0 ? 1.0 - 0.5 * (d1s * l1m + d2s * l2p)
                                : (d1s * chi(1, -1, k) - d2s * chi(2, +1, k)) / (2.0 * k * w));
      const double c3 = 0.5 * d12 * (chi(1, -1, k) - chi(2, +1, k)) *
                        detail::inverse(p.eps1 - p.eps2 + k * w, w, 0, -1, k);
      out[1][ki] << -d2 * chi(2, +1, k), c2, c3, d1 * chi(1, -1, k);
    }
    // alpha = 3
    {
      const double c2 = 0.5 * d12 * (chi(2, -1, k) - chi(1, +1, k)) *
                        detail::inverse(p.eps2 - p.eps1 + k * w, w, 0, -1, k);
      const double c3 = (k == 0 ? 1.0 - 0.5 * (d1s * l1p + d2s * l2m)
                                : (d2s * chi(2, -1, k) - d1s * chi(1, +1, k)) / (2.0 * k * w));
      out[2][ki] << -d1 * chi(1, +1, k), c2, c3, d2 * chi(2, -1, k);
    }
    // alpha = 4
    {
      double c1 = 0.0;
      double c4 = J.at(-k) * (1.0 - 0.5 * (d1s * l1m + d2s * l2m));
      for (int m = -K; m <= K; ++m) {
        if (m != 0) c4 -= 0.5 * J.at(m - k) * (d1s * chi(1, -1, -m) + d2s * chi(2, -1, -m)) / (m * w);
        const double jm = J.at(k + m) * pair_inv[static_cast<std::size_t>(m + K)];
        for (int n = -K; n <= K; ++n) c1 += (lam(1, -1, n) + lam(2, -1, n)) * jm * J.at(n + m);
      }
      out[3][ki] << -0.5 * d12 * c1, d1 * lam(1, -1, k), d2 * lam(2, -1, k), c4;
    }
  }
  return out;
}

namespace detail {

// sum_k [J_k (g + k omega) / (s*eps + g + k omega)]^2
inline double single_flip_sum(const BesselTable& J, int k_max, double eps, int s, double g, double w, int q) {
  double acc = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const double x = J.at(k) * (g + k * w) * inverse(s * eps + g + k * w, w, q, s, k);
    acc += x * x;
  }
  return acc;
}

// sum_k [sum_n J_n J_{k-n} (1 - (eps1(eps1+kw)/(eps1+gs+nw) + eps2(eps2+kw)/(eps2+gs+nw)) / (eps1+eps2+kw))]^2
inline double double_flip_sum(const BesselTable& J, int k_max, const SystemParams& p, double gs, double w) {
  double acc = 0.0;
  for (int k = -2 * k_max; k <= 2 * k_max; ++k) {
    const double inv_pair = inverse(p.eps1 + p.eps2 + k * w, w, 0, +1, k);
    double inner = 0.0;
    for (int n = -k_max; n <= k_max; ++n) {
      const double jj = J.at(n) * J.at(k - n);
      if (jj == 0.0) continue;
      const double a = p.eps1 * (p.eps1 + k * w) * inverse(p.eps1 + gs + n * w, w, 1, +1, n);
      const double b = p.eps2 * (p.eps2 + k * w) * inverse(p.eps2 + gs + n * w, w, 2, +1, n);
      inner += jj * (1.0 - inv_pair * (a + b));
    }
    acc += inner * inner;
  }
  return acc;
}

}  // namespace detail

/// Lowest-order S-matrix elements. Diagonal entries absorb the row sums so
/// that every row sums to one; S23 = S32 = 0 at this order.
inline Eigen::Matrix4d analytic_s_elements(const SystemParams& p, const Drive& d, const ChiTable& t) {
  detail::require_nonzero_bias(p);
  const auto& J = t.bessel();
  const int K = t.k_max();
  const double w = d.omega;
  const double r1 = p.delta1 * p.delta1 / (4.0 * p.eps1 * p.eps1);
  const double r2 = p.delta2 * p.delta2 / (4.0 * p.eps2 * p.eps2);

  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 1) = s(1, 0) = r2 * detail::single_flip_sum(J, K, p.eps2, +1, p.g, w, 2);
  s(0, 2) = s(2, 0) = r1 * detail::single_flip_sum(J, K, p.eps1, +1, p.g, w, 1);
  s(1, 3) = s(3, 1) = r1 * detail::single_flip_sum(J, K, p.eps1, -1, p.g, w, 1);
  s(2, 3) = s(3, 2) = r2 * detail::single_flip_sum(J, K, p.eps2, -1, p.g, w, 2);
  s(0, 3) = r1 * r2 * detail::double_flip_sum(J, K, p, p.g, w);
  s(3, 0) = r1 * r2 * detail::double_flip_sum(J, K, p, -p.g, w);
  for (int a = 0; a < 4; ++a) s(a, a) = 1.0 - (s.row(a).sum() - s(a, a));
  return s;
}

struct NonresonantProbabilities {
  double p12 = 0.0;
  double p13 = 0.0;
  double p14 = 0.0;
};

/// Averaged probabilities from the ground state in the non-resonant case,
/// exactly the printed series truncated at the table cutoff.
inline NonresonantProbabilities nonresonant_probabilities(const SystemParams& p, const Drive& d,
                                                          const ChiTable& t) {
  detail::require_nonzero_bias(p);
  const auto& J = t.bessel();
  const int K = t.k_max();
  const double w = d.omega;
  const double e1s = p.eps1 * p.eps1, e2s = p.eps2 * p.eps2;
  const double a2p = detail::single_flip_sum(J, K, p.eps2, +1, p.g, w, 2);
  const double a1p = detail::single_flip_sum(J, K, p.eps1, +1, p.g, w, 1);
  const double a1m = detail::single_flip_sum(J, K, p.eps1, -1, p.g, w, 1);
  const double a2m = detail::single_flip_sum(J, K, p.eps2, -1, p.g, w, 2);

  NonresonantProbabilities out;
  out.p12 = p.delta2 * p.delta2 / (2.0 * e2s) * a2p;
  out.p13 = p.delta1 * p.delta1 / (2.0 * e1s) * a1p;
  out.p14 = p.delta1 * p.delta1 * p.delta2 * p.delta2 / (16.0 * e1s * e2s) *
            (a2p * a1m + a1p * a2m + detail::double_flip_sum(J, K, p, p.g, w) +
             detail::double_flip_sum(J, K, p, -p.g, w));
  return out;
}

// ---------------------------------------------------------------------------
// Resonance catalog

enum class ResonanceKind { Eps1PlusG, Eps1MinusG, Eps2PlusG, Eps2MinusG, Eps1PlusEps2, Eps1MinusEps2 };

inline constexpr std::array<ResonanceKind, 6> kAllResonanceKinds = {
    ResonanceKind::Eps1PlusG,  ResonanceKind::Eps1MinusG,   ResonanceKind::Eps2PlusG,
    ResonanceKind::Eps2MinusG, ResonanceKind::Eps1PlusEps2, ResonanceKind::Eps1MinusEps2};

inline std::string to_string(ResonanceKind k) {
  switch (k) {
    case ResonanceKind::Eps1PlusG: return "eps1+g";
    case ResonanceKind::Eps1MinusG: return "eps1-g";
    case ResonanceKind::Eps2PlusG: return "eps2+g";
    case ResonanceKind::Eps2MinusG: return "eps2-g";
    case ResonanceKind::Eps1PlusEps2: return "eps1+eps2";
    case ResonanceKind::Eps1MinusEps2: return "eps1-eps2";
  }
  return "?";
}

/// Coefficients (c_eps1, c_eps2, c_g) of the combination that must be a
/// multiple of omega.
inline std::array<double, 3> condition_coefficients(ResonanceKind k) {
  switch (k) {
    case ResonanceKind::Eps1PlusG: return {1, 0, 1};
    case ResonanceKind::Eps1MinusG: return {1, 0, -1};
    case ResonanceKind::Eps2PlusG: return {0, 1, 1};
    case ResonanceKind::Eps2MinusG: return {0, 1, -1};
    case ResonanceKind::Eps1PlusEps2: return {1, 1, 0};
    case ResonanceKind::Eps1MinusEps2: return {1, -1, 0};
  }
  return {0, 0, 0};
}

inline double condition_value(ResonanceKind k, const SystemParams& p) {
  const auto c = condition_coefficients(k);
  return c[0] * p.eps1 + c[1] * p.eps2 + c[2] * p.g;
}

/// Parameters that vary affinely along one or two sweep coordinates:
/// eps1 = base.eps1 + slope_x.eps1 * x + slope_y.eps1 * y, and likewise for
/// eps2 and g (other fields of the slopes are ignored).
struct ParameterFamily {
  SystemParams base;
  SystemParams slope_x;
  SystemParams slope_y;

  SystemParams at(double x, double y = 0.0) const {
    SystemParams p = base;
    p.eps1 += slope_x.eps1 * x + slope_y.eps1 * y;
    p.eps2 += slope_x.eps2 * x + slope_y.eps2 * y;
    p.g += slope_x.g * x + slope_y.g * y;
    return p;
  }
};

struct ResonanceEntry {
  ResonanceKind kind;
  long n;           // photon number: combination = n * omega
  double location;  // sweep coordinate
};

using ResonanceCatalog = std::vector<ResonanceEntry>;

/// Every point in [lo, hi] of a one-dimensional sweep where one of the six
/// combinations is an integer multiple of omega, ordered by location.
inline ResonanceCatalog resonance_catalog(const ParameterFamily& family, const Drive& d, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("resonance_catalog: non-finite range");
  if (lo > hi) std::swap(lo, hi);
  ResonanceCatalog out;
  for (ResonanceKind kind : kAllResonanceKinds) {
    const auto c = condition_coefficients(kind);
    const double offset = condition_value(kind, family.base);
    const double slope = c[0] * family.slope_x.eps1 + c[1] * family.slope_x.eps2 + c[2] * family.slope_x.g;
    if (slope == 0.0) continue;
    const double v_lo = offset + slope * lo, v_hi = offset + slope * hi;
    const long n_first = static_cast<long>(std::ceil(std::min(v_lo, v_hi) / d.omega - 1e-12));
    const long n_last = static_cast<long>(std::floor(std::max(v_lo, v_hi) / d.omega + 1e-12));
    for (long n = n_first; n <= n_last; ++n) {
      const double x = (n * d.omega - offset) / slope;
      if (x < lo - 1e-12 || x > hi + 1e-12) continue;
      out.push_back({kind, n, std::clamp(x, lo, hi)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
    return a.location < b.location;
  });
  return out;
}

/// A resonance line in a two-dimensional sweep: a*x + b*y = c, clipped to the
/// sweep rectangle as the segment (x0, y0)-(x1, y1).
struct ResonanceLine {
  ResonanceKind kind;
  long n;
  double a, b, c;
  double x0, y0, x1, y1;
};

inline std::vector<ResonanceLine> resonance_lines(const ParameterFamily& family, const Drive& d, double x_lo,
                                                  double x_hi, double y_lo, double y_hi) {
  if (x_lo > x_hi) std::swap(x_lo, x_hi);
  if (y_lo > y_hi) std::swap(y_lo, y_hi);
  std::vector<ResonanceLine> out;
  for (ResonanceKind kind : kAllResonanceKinds) {
    const auto cf = condition_coefficients(kind);
    const double offset = condition_value(kind, family.base);
    const double a = cf[0] * family.slope_x.eps1 + cf[1] * family.slope_x.eps2 + cf[2] * family.slope_x.g;
    const double b = cf[0] * family.slope_y.eps1 + cf[1] * family.slope_y.eps2 + cf[2] * family.slope_y.g;
    if (a == 0.0 && b == 0.0) continue;
    const double v_min = offset + std::min(a * x_lo, a * x_hi) + std::min(b * y_lo, b * y_hi);
    const double v_max = offset + std::max(a * x_lo, a * x_hi) + std::max(b * y_lo, b * y_hi);
    const long n_first = static_cast<long>(std::ceil(v_min / d.omega - 1e-12));
    const long n_last = static_cast<long>(std::floor(v_max / d.omega + 1e-12));
    for (long n = n_first; n <= n_last; ++n) {
      const double c = n * d.omega - offset;
      // Intersections with the four rectangle edges.
      std::vector<std::pair<double, double>> pts;
      auto add = [&](double x, double y) {
        if (x < x_lo - 1e-12 || x > x_hi + 1e-12 || y < y_lo - 1e-12 || y > y_hi + 1e-12) return;
        for (const auto& q : pts)
          if (std::abs(q.first - x) < 1e-12 && std::abs(q.second - y) < 1e-12) return;
        pts.emplace_back(std::clamp(x, x_lo, x_hi), std::clamp(y, y_lo, y_hi));
      };
      if (b != 0.0) {
        add(x_lo, (c - a * x_lo) / b);
        add(x_hi, (c - a * x_hi) / b);
      }
      if (a != 0.0) {
        add((c - b * y_lo) / a, y_lo);
        add((c - b * y_hi) / a, y_hi);
      }
      if (pts.empty()) continue;
      std::sort(pts.begin(), pts.end());
      out.push_back({kind, n, a, b, c, pts.front().first, pts.front().second, pts.back().first, pts.back().second});
    }
  }
  return out;
}

}  // namespace spectroscope::perturbation
