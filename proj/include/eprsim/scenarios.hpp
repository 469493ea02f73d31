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

// Config-driven replication of the trajectory experiments: uncorrelated and
// entangled trajectory ensembles, EPR-variance decay, and the positive- vs
// negative-mass comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eprsim/analysis.hpp"
#include "eprsim/dynamics.hpp"
#include "eprsim/measurement.hpp"

namespace eprsim {

enum class ScenarioId {
  uncorrelated_trajectory,
  entangled_trajectory,
  epr_decay,
  mass_sign_comparison,
};

inline std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::uncorrelated_trajectory: return "uncorrelated_trajectory";
    case ScenarioId::entangled_trajectory: return "entangled_trajectory";
    case ScenarioId::epr_decay: return "epr_decay";
    case ScenarioId::mass_sign_comparison: return "mass_sign_comparison";
  }
  throw InvalidArgument("to_string: unknown scenario id");
}

struct PulseParams {
  double kappa = 1.0;
  double meter_variance = kVacuumVariance;
  double efficiency = 1.0;
};

struct ScenarioConfig {
  ScenarioId id = ScenarioId::uncorrelated_trajectory;
  int n_runs = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  DriveConfig drive{1.0, 0.0, 1.0, 0};
  PulseParams entangle_pulse{1.0};
  PulseParams readout_pulse{20.0};
  double gamma = 0.0;                 // decoherence rate between pulses
  double omega = 1.0;                 // |frequency| for mass_sign_comparison
  std::vector<double> time_grid;      // defaults applied per scenario
  std::optional<double> target_delta_epr;   // default 1.4 where used

  void validate() const {
    if (n_runs < 1) throw ConfigError("config: n_runs must be >= 1");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (gamma < 0.0) throw ConfigError("config: gamma must be >= 0");
    if (drive.duration < 0.0) throw ConfigError("config: drive tau must be >= 0");
    for (std::size_t i = 1; i < time_grid.size(); ++i)
      if (time_grid[i] <= time_grid[i - 1])
        throw ConfigError("config: time grid must be strictly increasing");
    if (target_delta_epr && (*target_delta_epr <= 0.0 || *target_delta_epr > 2.0))
      throw ConfigError("config: target_delta_epr must be in (0, 2]");
    auto check_pulse = [](const PulseParams& p, const char* name) {
      if (p.kappa < 0.0) throw ConfigError(std::string("config: ") + name + " kappa must be >= 0");
      if (p.meter_variance < kVacuumVariance)
        throw ConfigError(std::string("config: ") + name + " meter variance must be >= 1/2");
      if (p.efficiency <= 0.0 || p.efficiency > 1.0)
        throw ConfigError(std::string("config: ") + name + " efficiency must be in (0, 1]");
    };
    check_pulse(entangle_pulse, "entangle_pulse");
    check_pulse(readout_pulse, "readout_pulse");
    const bool trajectory = id == ScenarioId::uncorrelated_trajectory ||
                            id == ScenarioId::entangled_trajectory;
    if (trajectory && readout_pulse.kappa <= 0.0)
      throw ConfigError("config: readout_pulse kappa must be > 0 for trajectory scenarios");
    if (id == ScenarioId::mass_sign_comparison && entangle_pulse.kappa <= 0.0)
      throw ConfigError("config: entangle_pulse kappa must be > 0 for mass_sign_comparison");
  }

  /// Grid actually used: the configured one, or the scenario default.
  [[nodiscard]] std::vector<double> effective_time_grid() const {
    if (!time_grid.empty()) return time_grid;
    std::vector<double> grid;
    if (id == ScenarioId::epr_decay) {
      grid.reserve(50);
      for (int i = 0; i < 50; ++i) grid.push_back(5.0 * i / 49.0);
    } else if (id == ScenarioId::mass_sign_comparison) {
      const double period = 2.0 * std::numbers::pi / std::abs(omega);
      grid.reserve(33);
      for (int i = 0; i <= 32; ++i) grid.push_back(period * i / 32.0);
    }
    return grid;
  }
};

struct EprSeriesPoint {
  double t = 0.0;
  EprReport report;
};

/// Relative-coordinate variances in canonical relative-mode units, i.e.
/// Var((X1 - X2)/sqrt(2)) so that vacuum reads 0.5.
struct MassSignPoint {
  double t = 0.0;
  double var_rel_negative_mass = 0.0;
  double var_rel_positive_mass = 0.0;
};

struct TrajectoryEndpoint {
  int run = 0;
  double x = 0.0;   // readout of X1 - X2, relative to the conditional prediction
  double p = 0.0;   // readout of P1 + P2, likewise
};

struct ScenarioReport {
  ScenarioConfig config;
  std::optional<EnsembleStats> stats;
  std::vector<EprSeriesPoint> epr_series;
  std::vector<MassSignPoint> mass_series;
  std::vector<TrajectoryEndpoint> endpoints;
  std::optional<double> solved_entangle_kappa;
};

namespace detail {

inline std::vector<MeasurementChannel> epr_channels(const PulseParams& p) {
  return {
      {QuadratureCombination::relative_position(0, 1, 2), p.kappa,
       p.meter_variance, p.efficiency},
      {QuadratureCombination::momentum_sum(0, 1, 2), p.kappa, p.meter_variance,
       p.efficiency},
  };
}

/// Post-pulse covariance is outcome-independent, so the solver evaluates
/// the map kappa -> Delta_EPR on a fixed throwaway stream.
inline double delta_epr_after_pulse(double kappa, const PulseParams& base) {
  if (kappa == 0.0) return 2.0;
  PulseParams p = base;
  p.kappa = kappa;
  RandomStream probe(0);
  const auto [record, post] = qnd_pulse(vacuum_state(2), epr_channels(p), probe);
  return epr_variance(post, 0, 1).delta_epr;
}

/// Run a loop of independent Monte Carlo runs across threads. Each run owns
/// its (seed, index) substream, so the result is schedule-independent.
template <typename PerRun>
void parallel_runs(int n_runs, int threads, PerRun&& per_run) {
  threads = std::min(threads, n_runs);
  if (threads <= 1) {
    for (int r = 0; r < n_runs; ++r) per_run(r);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int r = w; r < n_runs; r += threads) per_run(r);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Bisection on the monotone map kappa -> Delta_EPR(kappa) for the
/// entangling pulse; tolerance 1e-8 on the achieved EPR variance.
inline double solve_entangle_kappa(double target_delta_epr, const PulseParams& pulse) {
  if (target_delta_epr <= 0.0 || target_delta_epr > 2.0)
    throw InfeasibleTarget("solve_entangle_kappa: target must be in (0, 2]");
  if (std::abs(target_delta_epr - 2.0) < 1e-12) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (detail::delta_epr_after_pulse(hi, pulse) > target_delta_epr) {
    hi *= 2.0;
    if (hi > 1e8)
      throw InfeasibleTarget(
          "solve_entangle_kappa: target Delta_EPR not achievable with the "
          "given meter variance and efficiency");
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    mid = 0.5 * (lo + hi);
    const double achieved = detail::delta_epr_after_pulse(mid, pulse);
    if (achieved == target_delta_epr) return mid;
    (achieved > target_delta_epr ? lo : hi) = mid;
  }
  if (std::abs(detail::delta_epr_after_pulse(mid, pulse) - target_delta_epr) > 1e-8)
    throw NumericalError("solve_entangle_kappa: bisection did not converge");
  return mid;
}

inline ScenarioReport run_uncorrelated_trajectory(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report;
  report.config = config;
  const Eigen::VectorXd d = drive_displacement(config.drive, 2);

  std::vector<std::array<double, 2>> endpoints(static_cast<std::size_t>(config.n_runs));
  detail::parallel_runs(config.n_runs, config.threads, [&](int r) {
    RandomStream rng = RandomStream::substream(config.seed, static_cast<std::uint64_t>(r));
    const GaussianState driven = displace(vacuum_state(2), d);
    const auto [record, post] =
        qnd_pulse(driven, detail::epr_channels(config.readout_pulse), rng);
    endpoints[static_cast<std::size_t>(r)] = {record.outcomes[0].value,
                                              record.outcomes[1].value};
  });

  report.endpoints.reserve(endpoints.size());
  for (int r = 0; r < config.n_runs; ++r)
    report.endpoints.push_back({r, endpoints[static_cast<std::size_t>(r)][0],
                                endpoints[static_cast<std::size_t>(r)][1]});
  if (config.n_runs >= 2) report.stats = ensemble_stats(endpoints);
  return report;
}

inline ScenarioReport run_entangled_trajectory(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report;
  report.config = config;
  const double target = config.target_delta_epr.value_or(1.4);
  const double kappa_e = solve_entangle_kappa(target, config.entangle_pulse);
  report.solved_entangle_kappa = kappa_e;

  PulseParams entangle = config.entangle_pulse;
  entangle.kappa = kappa_e;
  const Eigen::VectorXd d = drive_displacement(config.drive, 2);
  const std::vector<OscillatorModel> relax{
      {1.0, config.gamma, kVacuumVariance}, {-1.0, config.gamma, kVacuumVariance}};
  const auto cx = QuadratureCombination::relative_position(0, 1, 2);
  const auto cp = QuadratureCombination::momentum_sum(0, 1, 2);

  std::vector<std::array<double, 2>> endpoints(static_cast<std::size_t>(config.n_runs));
  detail::parallel_runs(config.n_runs, config.threads, [&](int r) {
    RandomStream rng = RandomStream::substream(config.seed, static_cast<std::uint64_t>(r));
    GaussianState state = vacuum_state(2);
    if (kappa_e > 0.0) {
      auto [record, post] = qnd_pulse(state, detail::epr_channels(entangle), rng);
      state = std::move(post);
    }
    // Conditional prediction, relaxed over the drive window.
    state = decohere(state, relax, config.drive.duration);
    const double pred_x = functional_stats(state, cx).first;
    const double pred_p = functional_stats(state, cp).first;
    state = displace(state, d);
    const auto [record, post] =
        qnd_pulse(state, detail::epr_channels(config.readout_pulse), rng);
    endpoints[static_cast<std::size_t>(r)] = {record.outcomes[0].value - pred_x,
                                              record.outcomes[1].value - pred_p};
  });

  report.endpoints.reserve(endpoints.size());
  for (int r = 0; r < config.n_runs; ++r)
    report.endpoints.push_back({r, endpoints[static_cast<std::size_t>(r)][0],
                                endpoints[static_cast<std::size_t>(r)][1]});
  if (config.n_runs >= 2) report.stats = ensemble_stats(endpoints);
  return report;
}

inline ScenarioReport run_epr_decay(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report;
  report.config = config;
  const double target = config.target_delta_epr.value_or(1.4);
  const double kappa_e = solve_entangle_kappa(target, config.entangle_pulse);
  report.solved_entangle_kappa = kappa_e;

  GaussianState state = vacuum_state(2);
  if (kappa_e > 0.0) {
    PulseParams entangle = config.entangle_pulse;
    entangle.kappa = kappa_e;
    RandomStream rng = RandomStream::substream(config.seed, 0);
    auto [record, post] = qnd_pulse(state, detail::epr_channels(entangle), rng);
    state = std::move(post);
  }

  const std::vector<OscillatorModel> relax{
      {1.0, config.gamma, kVacuumVariance}, {-1.0, config.gamma, kVacuumVariance}};
  for (double t : config.effective_time_grid()) {
    const GaussianState relaxed = decohere(state, relax, t);
    report.epr_series.push_back({t, epr_variance(relaxed, 0, 1)});
  }
  return report;
}

inline ScenarioReport run_mass_sign_comparison(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report;
  report.config = config;

  // Isotropic conditioning: both X1-X2 and P1+P2 measured with equal kappa.
  RandomStream rng = RandomStream::substream(config.seed, 0);
  const auto [record, post] =
      qnd_pulse(vacuum_state(2), detail::epr_channels(config.entangle_pulse), rng);

  const double w = std::abs(config.omega);
  const std::vector<OscillatorModel> negative{{w}, {-w}};
  const std::vector<OscillatorModel> positive{{w}, {w}};
  const auto cx = QuadratureCombination::relative_position(0, 1, 2);

  for (double t : config.effective_time_grid()) {
    const GaussianState rot_neg =
        apply_symplectic(post, oscillator_propagator(t, negative));
    const GaussianState rot_pos =
        apply_symplectic(post, oscillator_propagator(t, positive));
    // Report in canonical relative-mode units (vacuum = 0.5).
    report.mass_series.push_back({t, functional_stats(rot_neg, cx).second / 2.0,
                                  functional_stats(rot_pos, cx).second / 2.0});
  }
  return report;
}

inline ScenarioReport run_scenario(const ScenarioConfig& config) {
  switch (config.id) {
    case ScenarioId::uncorrelated_trajectory: return run_uncorrelated_trajectory(config);
    case ScenarioId::entangled_trajectory: return run_entangled_trajectory(config);
    case ScenarioId::epr_decay: return run_epr_decay(config);
    case ScenarioId::mass_sign_comparison: return run_mass_sign_comparison(config);
  }
  throw InvalidArgument("run_scenario: unknown scenario id");
}

}  // namespace eprsim
