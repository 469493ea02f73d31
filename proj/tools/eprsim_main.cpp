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

// eprsim: config-driven trajectory/EPR scenario runner.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
// 3 infeasible entanglement target, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "eprsim/config.hpp"
#include "eprsim/emit.hpp"
#include "eprsim/scenarios.hpp"
#include "eprsim/version.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string summary_line(const eprsim::ScenarioReport& report) {
  std::ostringstream line;
  line << eprsim::to_string(report.config.id) << ": ";
  if (report.stats) {
    line << "std_ratio=" << report.stats->std_ratio_to_sql
         << " (x=" << report.stats->ratio_x << ", p=" << report.stats->ratio_p
         << ", n_runs=" << report.stats->n_runs << ")";
  } else if (!report.epr_series.empty()) {
    line << "delta_epr " << report.epr_series.front().report.delta_epr << " -> "
         << report.epr_series.back().report.delta_epr << " over "
         << report.epr_series.size() << " grid points";
  } else if (!report.mass_series.empty()) {
    line << "var_rel(neg)=" << report.mass_series.back().var_rel_negative_mass
         << " var_rel(pos)=" << report.mass_series.back().var_rel_positive_mass
         << " at t=" << report.mass_series.back().t;
  }
  return line.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian back-action-evading trajectory simulator"};
  app.set_version_flag("--version", eprsim::kVersion);

  std::string config_path;
  std::string out_dir = "out";
  std::string format_name = "both";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> runs_override;

  app.add_option("--config", config_path, "Path to the JSON config document")
      ->required();
  app.add_option("--seed", seed_override, "Override the config seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format_name, "Output format: csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--runs", runs_override, "Override the config n_runs");

  CLI11_PARSE(app, argc, argv);

  try {
    eprsim::ScenarioConfig config = eprsim::parse_config(read_text_file(config_path));
    if (seed_override) config.seed = *seed_override;
    if (runs_override) config.n_runs = *runs_override;
    config.validate();

    const eprsim::ScenarioReport report = eprsim::run_scenario(config);
    const auto written =
        eprsim::emit(report, eprsim::output_format_from_string(format_name), out_dir);

    std::cout << summary_line(report) << "\n";
    for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
    return 0;
  } catch (const eprsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eprsim::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eprsim::InfeasibleTarget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const eprsim::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
