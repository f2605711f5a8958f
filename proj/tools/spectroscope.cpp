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

// Batch front end: spectroscope <mode> --config FILE [--set key=value]... --out PATH --workers N

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectroscope/sweep/config.hpp"
#include "spectroscope/sweep/output.hpp"
#include "spectroscope/sweep/runner.hpp"
#include "spectroscope/version.hpp"

namespace sw = spectroscope::sweep;

namespace {

nlohmann::ordered_json sidecar(const sw::SweepConfig& c, const std::vector<sw::ResultRow>& rows, int workers,
                               const std::string& csv, const std::string& overlay) {
  nlohmann::ordered_json j;
  j["version"] = spectroscope::kVersion;
  j["mode"] = sw::to_string(c.mode);
  j["settings"] = c.settings;
  j["columns"] = sw::columns(c);
  j["rows"] = rows.size();
  j["workers"] = workers;
  j["k_max"] = c.k_max >= 0 ? c.k_max : spectroscope::floquet::default_k_max(c.drive);
  j["k_max_rule"] = c.k_max >= 0 ? "fixed" : "ceil(amplitude/omega) + 30 per point";
  j["tolerances"] = {{"propagation", c.tol},
                     {"dissipative_propagation", c.dissipation.tol},
                     {"resonance_gap", c.resonance_tolerance},
                     {"tail_flag", sw::kTailFlagThreshold}};
  std::map<std::string, int> flags;
  for (const auto& r : rows)
    for (const auto& f : r.flags) ++flags[f];
  j["flag_counts"] = flags;
  j["files"] = {{"csv", csv}};
  if (!overlay.empty()) j["files"]["overlay"] = overlay;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet spectroscopy sweeps for a driven pair of coupled qubits"};
  std::string mode, config, out;
  std::vector<std::string> overrides;
  int workers = 1;
  app.add_option("mode", mode, "quasienergies | sweep1d | sweep2d | gmap | dissipative")->required();
  app.add_option("--config", config, "key = value configuration file");
  app.add_option("--set", overrides, "override one key (key=value); repeatable");
  app.add_option("--out", out, "output CSV path")->required();
  app.add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", spectroscope::kVersion);
  CLI11_PARSE(app, argc, argv);

  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  sw::SweepConfig cfg;
  try {
    sw::Settings settings;
    if (!config.empty()) settings.parse_file(config);
    for (const auto& o : overrides) settings.set_assignment(o);
    settings.set("mode", mode);
    cfg = sw::build_config(settings);
  } catch (const sw::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const auto rows = sw::run(cfg, workers);

  std::ofstream csv(out, std::ios::binary);
  if (!csv) {
    std::cerr << "error: cannot write '" << out << "'\n";
    return 1;
  }
  sw::write_csv(csv, cfg, rows);

  std::string overlay_path;
  if (sw::is_two_dimensional(cfg.mode)) {
    overlay_path = out + ".overlay.csv";
    std::ofstream ov(overlay_path, std::ios::binary);
    sw::write_overlay(ov, cfg);
  }

  std::ofstream meta(out + ".meta", std::ios::binary);
  meta << sidecar(cfg, rows, workers, out, overlay_path).dump(2) << "\n";

  std::size_t failed = 0;
  for (const auto& r : rows)
    for (const auto& f : r.flags)
      if (f.size() > 6 && f.compare(f.size() - 6, 6, "-error") == 0) {
        ++failed;
        break;
      }
  std::cerr << rows.size() << " points written to " << out;
  if (failed) std::cerr << " (" << failed << " with errors)";
  std::cerr << "\n";
  return 0;
}
