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
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spectroscope/floquet.hpp"
#include "spectroscope/perturbation.hpp"
#include "spectroscope/sweep/config.hpp"
#include "spectroscope/sweep/runner.hpp"
#include "spectroscope/version.hpp"

namespace spectroscope::sweep {

/// Scientific notation with 12 significant digits; non-finite values as
/// nan / inf / -inf.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

inline std::string format_flags(const std::vector<std::string>& flags) {
  if (flags.empty()) return "ok";
  std::string s;
  for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
  return s;
}

/// Metadata lines shared by the data and overlay files.
inline void write_metadata(std::ostream& out, const SweepConfig& c) {
  out << "# spectroscope " << kVersion << "\n";
  out << "# mode: " << to_string(c.mode) << "\n";
  if (c.k_max >= 0)
    out << "# k_max: " << c.k_max << "\n";
  else
    out << "# k_max: ceil(amplitude/omega) + 30 per point (" << floquet::default_k_max(c.drive)
        << " at the base drive)\n";
  for (const auto& [k, v] : c.settings) out << "# " << k << " = " << v << "\n";
}

inline void write_csv(std::ostream& out, const SweepConfig& c, const std::vector<ResultRow>& rows) {
  write_metadata(out, c);
  const auto cols = columns(c);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) {
    for (const double v : r.values) out << format_number(v) << ",";
    out << format_flags(r.flags) << "\n";
  }
}

/// Parameter family of a two-dimensional sweep for the resonance overlay, or
/// nothing when an axis enters the resonance conditions nonlinearly or not
/// at all (omega, amplitude, tunnel splittings).
inline std::optional<perturbation::ParameterFamily> overlay_family(const SweepConfig& c) {
  if (!c.y) return std::nullopt;
  perturbation::ParameterFamily fam;
  fam.base = c.params;
  fam.slope_x = {0, 0, 0, 0, 0};
  fam.slope_y = {0, 0, 0, 0, 0};
  auto set_axis = [&](const std::string& name, model::SystemParams& slope) {
    if (name == "eps1") {
      fam.base.eps1 = 0.0;
      slope.eps1 = 1.0;
    } else if (name == "eps2") {
      fam.base.eps2 = 0.0;
      slope.eps2 = 1.0;
    } else if (name == "g") {
      fam.base.g = 0.0;
      slope.g = 1.0;
    } else {
      return false;
    }
    return true;
  };
  if (!set_axis(c.x.param, fam.slope_x) || !set_axis(c.y->param, fam.slope_y)) return std::nullopt;
  if (c.ratio) {
    fam.base.eps2 = *c.ratio * fam.base.eps1;
    fam.slope_x.eps2 = *c.ratio * fam.slope_x.eps1;
    fam.slope_y.eps2 = *c.ratio * fam.slope_y.eps1;
  }
  return fam;
}

/// Resonance lines a*x + b*y = c clipped to the sweep rectangle.
inline void write_overlay(std::ostream& out, const SweepConfig& c) {
  write_metadata(out, c);
  out << "# lines: a*x + b*y = c with x = " << c.x.param << ", y = " << (c.y ? c.y->param : "-") << "\n";
  std::vector<perturbation::ResonanceLine> lines;
  if (const auto fam = overlay_family(c))
    lines = perturbation::resonance_lines(*fam, c.drive, c.x.min, c.x.max, c.y->min, c.y->max);
  else
    out << "# no lines: axes do not enter the resonance conditions linearly\n";
  out << "kind,n,a,b,c,x0,y0,x1,y1\n";
  for (const auto& l : lines)
    out << perturbation::to_string(l.kind) << "," << l.n << "," << format_number(l.a) << "," << format_number(l.b)
        << "," << format_number(l.c) << "," << format_number(l.x0) << "," << format_number(l.y0) << ","
        << format_number(l.x1) << "," << format_number(l.y1) << "\n";
}

}  // namespace spectroscope::sweep
