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

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectroscope/model.hpp"

namespace spectroscope::sweep {

/// Bad configuration input, naming the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::invalid_argument("config key '" + key + "': " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class Mode { Quasienergies, Sweep1d, Sweep2d, GMap, Dissipative };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Quasienergies: return "quasienergies";
    case Mode::Sweep1d: return "sweep1d";
    case Mode::Sweep2d: return "sweep2d";
    case Mode::GMap: return "gmap";
    case Mode::Dissipative: return "dissipative";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::Quasienergies, Mode::Sweep1d, Mode::Sweep2d, Mode::GMap, Mode::Dissipative})
    if (to_string(m) == s) return m;
  throw ConfigError("mode", "unknown mode '" + s + "'");
}

inline bool is_two_dimensional(Mode m) { return m == Mode::Sweep2d || m == Mode::GMap; }

/// Parameters an axis may sweep.
inline const std::vector<std::string>& axis_parameters() {
  static const std::vector<std::string> names = {"eps1", "eps2", "delta1", "delta2", "g", "amplitude", "omega"};
  return names;
}

struct Axis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  double value(int i) const {
    if (points == 1) return min;
    // Endpoints are hit exactly; interior points by linear interpolation.
    if (i == points - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
};

/// Every key the parser accepts, with its default ("" = unset).
inline const std::map<std::string, std::string>& known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"mode", ""},          {"eps1", "0"},         {"eps2", "0"},          {"delta1", "0"},
      {"delta2", "0"},       {"g", "0"},            {"amplitude", "0"},     {"omega", "1"},
      {"phi0", "0"},         {"ratio", ""},         {"x.param", ""},        {"x.min", ""},
      {"x.max", ""},         {"x.points", ""},      {"y.param", ""},        {"y.min", ""},
      {"y.max", ""},         {"y.points", ""},      {"tol", "1e-11"},       {"k_max", "-1"},
      {"min_samples", "1024"}, {"resonance_tolerance", "1e-3"},             {"gamma1", "0"},
      {"gamma2", "0"},       {"gamma_phi1", "0"},   {"gamma_phi2", "0"},    {"gamma_up1", ""},
      {"gamma_up2", ""},     {"temperature", ""},   {"diss_tol", "1e-10"},  {"diss_samples", "256"},
      {"transient", "false"},
  };
  return keys;
}

/// Raw `key = value` settings, later entries overriding earlier ones.
class Settings {
 public:
  void set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
    values_[key] = value;
  }

  /// "key=value" as given on the command line.
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, "expected key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void parse(std::istream& in, const std::string& source = "config") {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(line, source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    parse(in, path);
  }

  std::string get(const std::string& key) const {
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    return known_keys().at(key);
  }
  bool has(const std::string& key) const { return !get(key).empty(); }

  double number(const std::string& key) const {
    const std::string s = get(key);
    if (s.empty()) throw ConfigError(key, "missing value");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError(key, "not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError(key, "not a finite number: '" + s + "'");
    return v;
  }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "not an integer: '" + get(key) + "'");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key) const {
    const std::string s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "not a boolean: '" + s + "'");
  }

  /// Resolved value of every known key, in key order.
  std::map<std::string, std::string> resolved() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, def] : known_keys()) out[k] = get(k);
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

struct DissipationSettings {
  std::array<double, 2> gamma{};
  std::array<double, 2> gamma_phi{};
  std::optional<std::array<double, 2>> gamma_up;
  std::optional<double> temperature;  // kelvin
  double tol = 1e-10;
  int samples = 256;
  bool transient = false;
};

struct SweepConfig {
  Mode mode = Mode::Sweep1d;
  model::SystemParams params;
  model::Drive drive;
  std::optional<double> ratio;  // eps2 = ratio * eps1 at every point
  Axis x;
  std::optional<Axis> y;
  double tol = 1e-11;
  int k_max = -1;
  int min_samples = 1024;
  double resonance_tolerance = 1e-3;
  DissipationSettings dissipation;
  std::map<std::string, std::string> settings;  // resolved keys, for metadata

  /// Parameters at one grid point.
  model::SystemParams params_at(double xv, double yv = 0.0) const;
  model::Drive drive_at(double xv, double yv = 0.0) const;
};

namespace detail {

inline void assign(const std::string& name, double v, model::SystemParams& p, model::Drive& d) {
  if (name == "eps1") p.eps1 = v;
  else if (name == "eps2") p.eps2 = v;
  else if (name == "delta1") p.delta1 = v;
  else if (name == "delta2") p.delta2 = v;
  else if (name == "g") p.g = v;
  else if (name == "amplitude") d.amplitude = v;
  else if (name == "omega") d.omega = v;
}

inline Axis read_axis(const Settings& s, const std::string& prefix) {
  Axis a;
  a.param = s.get(prefix + ".param");
  bool known = false;
  for (const auto& n : axis_parameters()) known = known || n == a.param;
  if (!known) throw ConfigError(prefix + ".param", "not a sweepable parameter: '" + a.param + "'");
  a.min = s.number(prefix + ".min");
  a.max = s.number(prefix + ".max");
  a.points = s.integer(prefix + ".points");
  if (a.points < 2) throw ConfigError(prefix + ".points", "must be >= 2");
  return a;
}

}  // namespace detail

inline model::SystemParams SweepConfig::params_at(double xv, double yv) const {
  model::SystemParams p = params;
  model::Drive d = drive;
  detail::assign(x.param, xv, p, d);
  if (y) detail::assign(y->param, yv, p, d);
  if (ratio) p.eps2 = *ratio * p.eps1;
  return p;
}

inline model::Drive SweepConfig::drive_at(double xv, double yv) const {
  model::SystemParams p = params;
  model::Drive d = drive;
  detail::assign(x.param, xv, p, d);
  if (y) detail::assign(y->param, yv, p, d);
  return d;
}

/// Validate settings and build the sweep description.
inline SweepConfig build_config(const Settings& s) {
  SweepConfig c;
  if (!s.has("mode")) throw ConfigError("mode", "missing");
  c.mode = parse_mode(s.get("mode"));
  c.params = {s.number("eps1"), s.number("eps2"), s.number("delta1"), s.number("delta2"), s.number("g")};
  c.drive.amplitude = s.number("amplitude");
  c.drive.omega = s.number("omega");
  c.drive.phi0 = s.number("phi0");
  if (c.params.delta1 < 0.0) throw ConfigError("delta1", "must be >= 0");
  if (c.params.delta2 < 0.0) throw ConfigError("delta2", "must be >= 0");
  if (!(c.drive.omega > 0.0)) throw ConfigError("omega", "must be > 0");
  if (s.has("ratio")) c.ratio = s.number("ratio");

  c.x = detail::read_axis(s, "x");
  if (is_two_dimensional(c.mode)) {
    c.y = detail::read_axis(s, "y");
    if (c.y->param == c.x.param) throw ConfigError("y.param", "must differ from x.param");
    if (c.mode == Mode::GMap && c.y->param != "g") throw ConfigError("y.param", "gmap sweeps g on the y axis");
  } else {
    for (const char* k : {"y.param", "y.min", "y.max", "y.points"})
      if (s.has(k)) throw ConfigError(k, "only valid for two-dimensional modes");
  }
  if (c.ratio) {
    if (c.x.param == "eps2" || (c.y && c.y->param == "eps2"))
      throw ConfigError("ratio", "eps2 is linked to eps1 and cannot be swept");
  }
  for (const Axis* a : {&c.x, c.y ? &*c.y : nullptr}) {
    if (!a) continue;
    if ((a->param == "delta1" || a->param == "delta2") && std::min(a->min, a->max) < 0.0)
      throw ConfigError(a == &c.x ? "x.min" : "y.min", "tunnel splittings must be >= 0");
    if (a->param == "omega" && std::min(a->min, a->max) <= 0.0)
      throw ConfigError(a == &c.x ? "x.min" : "y.min", "omega must be > 0");
  }

  c.tol = s.number("tol");
  if (!(c.tol >= 1e-13 && c.tol <= 1e-6)) throw ConfigError("tol", "must lie in [1e-13, 1e-6]");
  c.k_max = s.integer("k_max");
  c.min_samples = s.integer("min_samples");
  if (c.min_samples < 4 || (c.min_samples & (c.min_samples - 1)) != 0)
    throw ConfigError("min_samples", "must be a power of two >= 4");
  c.resonance_tolerance = s.number("resonance_tolerance");

  auto& ds = c.dissipation;
  ds.gamma = {s.number("gamma1"), s.number("gamma2")};
  ds.gamma_phi = {s.number("gamma_phi1"), s.number("gamma_phi2")};
  for (const char* k : {"gamma1", "gamma2", "gamma_phi1", "gamma_phi2"})
    if (s.number(k) < 0.0) throw ConfigError(k, "rates must be >= 0");
  if (s.has("gamma_up1") || s.has("gamma_up2")) {
    if (s.has("temperature")) throw ConfigError("temperature", "conflicts with explicit gamma_up1/gamma_up2");
    ds.gamma_up = std::array<double, 2>{s.number("gamma_up1"), s.number("gamma_up2")};
  }
  if (s.has("temperature")) {
    ds.temperature = s.number("temperature");
    if (!(*ds.temperature > 0.0)) throw ConfigError("temperature", "must be > 0 (omit it for zero temperature)");
  }
  ds.tol = s.number("diss_tol");
  if (!(ds.tol >= 1e-13 && ds.tol <= 1e-6)) throw ConfigError("diss_tol", "must lie in [1e-13, 1e-6]");
  ds.samples = s.integer("diss_samples");
  if (ds.samples < 4 || (ds.samples & (ds.samples - 1)) != 0)
    throw ConfigError("diss_samples", "must be a power of two >= 4");
  ds.transient = s.boolean("transient");
  if (c.mode == Mode::Dissipative && ds.gamma[0] <= 0.0 && ds.gamma[1] <= 0.0)
    throw ConfigError("gamma1", "dissipative mode needs a nonzero relaxation rate");
  if (ds.transient && (ds.gamma[0] * ds.gamma_phi[0] <= 0.0))
    throw ConfigError("transient", "needs nonzero gamma1 and gamma_phi1 to set the pulse duration");

  c.settings = s.resolved();
  return c;
}

}  // namespace spectroscope::sweep
