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

// Config document ingestion. The document is flat JSON mirroring
// ScenarioConfig; unknown keys are rejected so typos fail loudly.

#include <json.hpp>
#include <set>
#include <string>

#include "eprsim/scenarios.hpp"

namespace eprsim {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key))
      throw ConfigError("config: unknown key '" + key + "' in " + where);
}

inline PulseParams parse_pulse(const nlohmann::json& obj, const std::string& where,
                               PulseParams defaults) {
  reject_unknown_keys(obj, {"kappa", "meter_variance", "efficiency"}, where);
  PulseParams p = defaults;
  if (obj.contains("kappa")) p.kappa = obj.at("kappa").get<double>();
  if (obj.contains("meter_variance"))
    p.meter_variance = obj.at("meter_variance").get<double>();
  if (obj.contains("efficiency")) p.efficiency = obj.at("efficiency").get<double>();
  return p;
}

}  // namespace detail

inline ScenarioId scenario_id_from_string(const std::string& name) {
  if (name == "uncorrelated_trajectory") return ScenarioId::uncorrelated_trajectory;
  if (name == "entangled_trajectory") return ScenarioId::entangled_trajectory;
  if (name == "epr_decay") return ScenarioId::epr_decay;
  if (name == "mass_sign_comparison") return ScenarioId::mass_sign_comparison;
  throw ConfigError("config: unknown scenario '" + name + "'");
}

inline ScenarioConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");

  detail::reject_unknown_keys(
      doc,
      {"scenario", "n_runs", "seed", "threads", "gamma", "omega",
       "target_delta_epr", "time_grid", "drive", "entangle_pulse", "readout_pulse"},
      "top level");
  if (!doc.contains("scenario"))
    throw ConfigError("config: missing required key 'scenario'");

  ScenarioConfig config;
  try {
    config.id = scenario_id_from_string(doc.at("scenario").get<std::string>());
    if (doc.contains("n_runs")) config.n_runs = doc.at("n_runs").get<int>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
    if (doc.contains("gamma")) config.gamma = doc.at("gamma").get<double>();
    if (doc.contains("omega")) config.omega = doc.at("omega").get<double>();
    if (doc.contains("target_delta_epr"))
      config.target_delta_epr = doc.at("target_delta_epr").get<double>();
    if (doc.contains("time_grid"))
      config.time_grid = doc.at("time_grid").get<std::vector<double>>();
    if (doc.contains("drive")) {
      const auto& drive = doc.at("drive");
      detail::reject_unknown_keys(drive, {"amplitude", "phase", "tau", "mode"}, "drive");
      if (drive.contains("amplitude"))
        config.drive.amplitude = drive.at("amplitude").get<double>();
      if (drive.contains("phase")) config.drive.phase = drive.at("phase").get<double>();
      if (drive.contains("tau")) config.drive.duration = drive.at("tau").get<double>();
      if (drive.contains("mode")) config.drive.target_mode = drive.at("mode").get<int>();
    }
    if (doc.contains("entangle_pulse"))
      config.entangle_pulse = detail::parse_pulse(doc.at("entangle_pulse"),
                                                  "entangle_pulse", config.entangle_pulse);
    if (doc.contains("readout_pulse"))
      config.readout_pulse = detail::parse_pulse(doc.at("readout_pulse"),
                                                 "readout_pulse", config.readout_pulse);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  config.validate();
  return config;
}

inline nlohmann::json config_to_json(const ScenarioConfig& config) {
  nlohmann::json doc;
  doc["scenario"] = to_string(config.id);
  doc["n_runs"] = config.n_runs;
  doc["seed"] = config.seed;
  // threads is an execution detail, not scenario semantics; outputs must be
  // byte-identical across thread counts, so it is not echoed.
  doc["gamma"] = config.gamma;
  doc["omega"] = config.omega;
  if (config.target_delta_epr) doc["target_delta_epr"] = *config.target_delta_epr;
  if (!config.time_grid.empty()) doc["time_grid"] = config.time_grid;
  doc["drive"] = {{"amplitude", config.drive.amplitude},
                  {"phase", config.drive.phase},
                  {"tau", config.drive.duration},
                  {"mode", config.drive.target_mode}};
  doc["entangle_pulse"] = {{"kappa", config.entangle_pulse.kappa},
                           {"meter_variance", config.entangle_pulse.meter_variance},
                           {"efficiency", config.entangle_pulse.efficiency}};
  doc["readout_pulse"] = {{"kappa", config.readout_pulse.kappa},
                          {"meter_variance", config.readout_pulse.meter_variance},
                          {"efficiency", config.readout_pulse.efficiency}};
  return doc;
}

}  // namespace eprsim
