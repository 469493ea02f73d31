// Copyright 2026 The eprsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV/JSON result emission. CSV carries the plot-facing series; the JSON
// summary echoes the config and statistics with provenance (seed, version).
// Numbers are serialized with 17 significant digits so replays round-trip.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "eprsim/config.hpp"
#include "eprsim/scenarios.hpp"
#include "eprsim/version.hpp"

namespace eprsim {

enum class OutputFormat { csv, json, both };

inline OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "both") return OutputFormat::both;
  throw ConfigError("format must be one of csv, json, both");
}

namespace detail {

inline std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit: cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("emit: write failed for " + path.string());
}

inline std::string report_csv(const ScenarioReport& report) {
  std::string body;
  switch (report.config.id) {
    case ScenarioId::uncorrelated_trajectory:
    case ScenarioId::entangled_trajectory:
      body = "run,x_end,p_end\n";
      for (const auto& e : report.endpoints)
        body += std::to_string(e.run) + "," + fmt17(e.x) + "," + fmt17(e.p) + "\n";
      break;
    case ScenarioId::epr_decay:
      body = "t,var_x_minus,var_p_plus,delta_epr\n";
      for (const auto& pt : report.epr_series)
        body += fmt17(pt.t) + "," + fmt17(pt.report.var_x_minus) + "," +
                fmt17(pt.report.var_p_plus) + "," + fmt17(pt.report.delta_epr) + "\n";
      break;
    case ScenarioId::mass_sign_comparison:
      body = "t,var_rel_negative_mass,var_rel_positive_mass\n";
      for (const auto& pt : report.mass_series)
        body += fmt17(pt.t) + "," + fmt17(pt.var_rel_negative_mass) + "," +
                fmt17(pt.var_rel_positive_mass) + "\n";
      break;
  }
  return body;
}

inline nlohmann::json report_summary(const ScenarioReport& report) {
  nlohmann::json doc;
  doc["config"] = config_to_json(report.config);
  doc["provenance"] = {{"seed", report.config.seed}, {"version", kVersion}};
  if (report.solved_entangle_kappa)
    doc["solved_entangle_kappa"] = *report.solved_entangle_kappa;
  if (report.stats) {
    const auto& s = *report.stats;
    doc["stats"] = {{"n_runs", s.n_runs},
                    {"mean_endpoint", {s.mean_endpoint[0], s.mean_endpoint[1]}},
                    {"std_x", s.std_x},
                    {"std_p", s.std_p},
                    {"ratio_x", s.ratio_x},
                    {"ratio_p", s.ratio_p},
                    {"std_ratio_to_sql", s.std_ratio_to_sql}};
  }
  if (!report.epr_series.empty()) {
    doc["delta_epr_first"] = report.epr_series.front().report.delta_epr;
    doc["delta_epr_last"] = report.epr_series.back().report.delta_epr;
  }
  if (!report.mass_series.empty()) {
    doc["var_rel_negative_mass_last"] = report.mass_series.back().var_rel_negative_mass;
    doc["var_rel_positive_mass_last"] = report.mass_series.back().var_rel_positive_mass;
  }
  return doc;
}

}  // namespace detail

/// Write <out>/<scenario>.csv and/or <out>/<scenario>.summary.json.
/// Returns the paths written.
inline std::vector<std::filesystem::path> emit(const ScenarioReport& report,
                                               OutputFormat format,
                                               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("emit: cannot create " + out_dir.string());

  const std::string stem = to_string(report.config.id);
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::csv || format == OutputFormat::both) {
    const auto path = out_dir / (stem + ".csv");
    detail::write_file(path, detail::report_csv(report));
    written.push_back(path);
  }
  if (format == OutputFormat::json || format == OutputFormat::both) {
    const auto path = out_dir / (stem + ".summary.json");
    detail::write_file(path, detail::report_summary(report).dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace eprsim
