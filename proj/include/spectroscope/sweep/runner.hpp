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
#include <atomic>
#include <cmath>
#include <exception>
#include <initializer_list>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "spectroscope/dissipation.hpp"
#include "spectroscope/floquet.hpp"
#include "spectroscope/perturbation.hpp"
#include "spectroscope/rwa.hpp"
#include "spectroscope/sweep/config.hpp"

namespace spectroscope::sweep {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Tail bound above which a row is flagged as truncation-limited.
inline constexpr double kTailFlagThreshold = 1e-10;

struct ResultRow {
  std::vector<double> values;
  std::vector<std::string> flags;
};

/// Run f(i) for i in [0, n) on up to `workers` threads. Indices are handed out
/// through a shared counter; f must write only to slot i.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Column names after the axis columns, per mode.
inline std::vector<std::string> value_columns(Mode m) {
  switch (m) {
    case Mode::Quasienergies:
      return {"gamma1", "gamma2", "gamma3", "gamma4", "gamma1_pt", "gamma2_pt", "gamma3_pt", "gamma4_pt", "min_gap"};
    case Mode::Dissipative:
      return {"p11", "p12", "p13", "p14", "concurrence", "periodicity_residual", "min_eigenvalue", "trace_error"};
    case Mode::Sweep1d:
    case Mode::Sweep2d:
    case Mode::GMap:
      return {"gamma1",    "gamma2",    "gamma3",    "gamma4",    "p12",       "p13",
              "p14",       "p12_pt",    "p13_pt",    "p14_pt",    "gamma1_pt", "gamma2_pt",
              "gamma3_pt", "gamma4_pt", "p12_rwa",   "p13_rwa",   "p14_rwa",   "omega0_12",
              "omega0_13", "omega0_14", "delta0_14", "min_gap",   "route_discrepancy"};
  }
  return {};
}

inline std::vector<std::string> columns(const SweepConfig& c) {
  std::vector<std::string> out{c.x.param};
  if (c.y) out.push_back(c.y->param);
  for (auto& v : value_columns(c.mode)) out.push_back(v);
  out.push_back("flags");
  return out;
}

namespace detail {

inline void add_flag(ResultRow& r, const std::string& f) {
  if (std::find(r.flags.begin(), r.flags.end(), f) == r.flags.end()) r.flags.push_back(f);
}

inline void put(ResultRow& r, std::initializer_list<double> v) { r.values.insert(r.values.end(), v); }

inline floquet::FloquetOptions floquet_options(const SweepConfig& c) {
  floquet::FloquetOptions o;
  o.tol = c.tol;
  o.k_max = c.k_max;
  o.min_samples = c.min_samples;
  o.resonance_tolerance = c.resonance_tolerance;
  return o;
}

inline int k_max_for(const SweepConfig& c, const model::Drive& d) {
  return c.k_max >= 0 ? c.k_max : floquet::default_k_max(d);
}

struct NumericPart {
  std::array<double, 4> gammas{kNaN, kNaN, kNaN, kNaN};
  std::array<double, 3> p{kNaN, kNaN, kNaN};
  double min_gap = kNaN;
  double route_discrepancy = kNaN;
};

inline NumericPart numeric_part(ResultRow& r, const SweepConfig& c, const model::SystemParams& p,
                                const model::Drive& d, bool with_probabilities) {
  NumericPart out;
  try {
    if (with_probabilities) {
      const auto pt = floquet::solve_point(p, d, floquet_options(c));
      out.gammas = pt.solution.gammas;
      out.p = {pt.table.pbar(0, 1), pt.table.pbar(0, 2), pt.table.pbar(0, 3)};
      out.min_gap = pt.solution.min_gap;
      out.route_discrepancy = pt.table.route_discrepancy;
      if (pt.solution.resonant) add_flag(r, "resonant");
    } else {
      const auto sol = floquet::floquet_modes(p, d, floquet_options(c));
      out.gammas = sol.gammas;
      out.min_gap = sol.min_gap;
      if (sol.resonant) add_flag(r, "resonant");
    }
  } catch (const std::exception&) {
    add_flag(r, "floquet-error");
  }
  return out;
}

struct AnalyticPart {
  std::array<double, 4> gammas{kNaN, kNaN, kNaN, kNaN};
  std::array<double, 3> p{kNaN, kNaN, kNaN};
};

inline AnalyticPart analytic_part(ResultRow& r, const SweepConfig& c, const model::SystemParams& p,
                                  const model::Drive& d, bool with_probabilities) {
  AnalyticPart out;
  try {
    const auto table = perturbation::chi_table(p, d, k_max_for(c, d));
    if (table.tail_bound() > kTailFlagThreshold) add_flag(r, "tail");
    out.gammas = perturbation::quasienergy_2nd(p, d, table);
    if (with_probabilities) {
      if (p.eps1 == 0.0 || p.eps2 == 0.0) {
        add_flag(r, "zero-bias");
      } else {
        const auto np = perturbation::nonresonant_probabilities(p, d, table);
        out.p = {np.p12, np.p13, np.p14};
      }
    }
  } catch (const ResonanceError&) {
    add_flag(r, "analytic-pole");
  } catch (const std::exception&) {
    add_flag(r, "analytic-error");
  }
  return out;
}

struct RwaPart {
  std::array<double, 3> p{kNaN, kNaN, kNaN};
  std::array<double, 3> omega0{kNaN, kNaN, kNaN};
  double delta0 = kNaN;
};

inline RwaPart rwa_part(ResultRow& r, const SweepConfig& c, const model::SystemParams& p, const model::Drive& d) {
  RwaPart out;
  const rwa::Channel channels[3] = {rwa::Channel::ToState2, rwa::Channel::ToState3, rwa::Channel::ToState4};
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      const auto ch = rwa::resonant_channel(channels[i], p, d, k_max_for(c, d));
      out.p[i] = rwa::lorentzian_profile(ch)(ch.delta);
      out.omega0[i] = ch.omega0;
      if (i == 2) out.delta0 = ch.delta0;
    } catch (const ResonanceError&) {
      add_flag(r, "rwa-pole");
    } catch (const std::exception&) {
      add_flag(r, "rwa-error");
    }
  }
  return out;
}

inline ResultRow quasienergy_row(const SweepConfig& c, const model::SystemParams& p, const model::Drive& d) {
  ResultRow r;
  const auto num = numeric_part(r, c, p, d, false);
  const auto an = analytic_part(r, c, p, d, false);
  const auto& g = num.gammas;
  const auto& a = an.gammas;
  put(r, {g[0], g[1], g[2], g[3], a[0], a[1], a[2], a[3], num.min_gap});
  return r;
}

inline ResultRow full_row(const SweepConfig& c, const model::SystemParams& p, const model::Drive& d) {
  ResultRow r;
  const auto num = numeric_part(r, c, p, d, true);
  const auto an = analytic_part(r, c, p, d, true);
  const auto rw = rwa_part(r, c, p, d);
  const auto& g = num.gammas;
  const auto& a = an.gammas;
  put(r, {g[0], g[1], g[2], g[3], num.p[0], num.p[1], num.p[2], an.p[0], an.p[1], an.p[2], a[0], a[1], a[2], a[3],
          rw.p[0], rw.p[1], rw.p[2], rw.omega0[0], rw.omega0[1], rw.omega0[2], rw.delta0, num.min_gap,
          num.route_discrepancy});
  return r;
}

inline dissipation::Rates rates_for(const SweepConfig& c, const model::SystemParams& p) {
  const auto& ds = c.dissipation;
  if (ds.temperature)
    return dissipation::Rates::thermal(p, ds.gamma, ds.gamma_phi, dissipation::bath_temperature(*ds.temperature));
  dissipation::Rates r;
  r.gamma_down = ds.gamma;
  r.gamma_phi = ds.gamma_phi;
  if (ds.gamma_up) r.gamma_up = *ds.gamma_up;
  return r;
}

inline ResultRow dissipative_row(const SweepConfig& c, const model::SystemParams& p, const model::Drive& d) {
  ResultRow r;
  try {
    const auto rates = rates_for(c, p);
    dissipation::SteadyStateOptions opt;
    opt.tol = c.dissipation.tol;
    opt.n_samples = c.dissipation.samples;
    const auto basis = model::product_eigenbasis(p);
    dissipation::PeriodicState st;
    if (c.dissipation.transient) {
      add_flag(r, "transient");
      st = dissipation::transient_state(p, d, rates, basis[0], dissipation::pulse_duration(rates, 1), opt);
    } else {
      st = dissipation::periodic_steady_state(p, d, rates, opt);
    }
    const auto probs = dissipation::averaged_probabilities_dissipative(st, basis);
    if (st.min_eigenvalue < -1e-8) add_flag(r, "positivity");
    put(r, {probs[0], probs[1], probs[2], probs[3], dissipation::averaged_concurrence(st), st.residual,
            st.min_eigenvalue, st.max_trace_error});
  } catch (const std::exception&) {
    add_flag(r, "dissipation-error");
    r.values.assign(value_columns(Mode::Dissipative).size(), kNaN);
  }
  return r;
}

}  // namespace detail

/// One grid point: axis values plus the per-mode results.
inline ResultRow compute_point(const SweepConfig& c, double xv, double yv) {
  const auto p = c.params_at(xv, yv);
  const auto d = c.drive_at(xv, yv);
  ResultRow r;
  switch (c.mode) {
    case Mode::Quasienergies: r = detail::quasienergy_row(c, p, d); break;
    case Mode::Dissipative: r = detail::dissipative_row(c, p, d); break;
    case Mode::Sweep1d:
    case Mode::Sweep2d:
    case Mode::GMap: r = detail::full_row(c, p, d); break;
  }
  std::vector<double> head{xv};
  if (c.y) head.push_back(yv);
  r.values.insert(r.values.begin(), head.begin(), head.end());
  return r;
}

inline std::size_t point_count(const SweepConfig& c) {
  return static_cast<std::size_t>(c.x.points) * static_cast<std::size_t>(c.y ? c.y->points : 1);
}

/// All rows in grid order (x slowest), independent of the worker count.
inline std::vector<ResultRow> run(const SweepConfig& c, int workers) {
  const std::size_t n = point_count(c);
  const int ny = c.y ? c.y->points : 1;
  std::vector<ResultRow> rows(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const int ix = static_cast<int>(i / static_cast<std::size_t>(ny));
    const int iy = static_cast<int>(i % static_cast<std::size_t>(ny));
    rows[i] = compute_point(c, c.x.value(ix), c.y ? c.y->value(iy) : 0.0);
  });
  return rows;
}

}  // namespace spectroscope::sweep
