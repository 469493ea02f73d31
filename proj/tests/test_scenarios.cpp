#include <doctest.h>

#include <cmath>

#include "eprsim/scenarios.hpp"

using namespace eprsim;

namespace {

ScenarioConfig base_config(ScenarioId id) {
  ScenarioConfig config;
  config.id = id;
  config.n_runs = 2000;
  config.seed = 1;
  return config;
}

}  // namespace

TEST_CASE("kappa solver hits the target Delta_EPR") {
  const PulseParams pulse{1.0, 0.5, 1.0};
  for (const double target : {1.0, 1.4, 1.8}) {
    const double kappa = solve_entangle_kappa(target, pulse);
    CHECK(std::abs(detail::delta_epr_after_pulse(kappa, pulse) - target) < 1e-6);
  }
  CHECK(solve_entangle_kappa(2.0, pulse) == 0.0);
  CHECK_THROWS_AS(solve_entangle_kappa(2.5, pulse), InfeasibleTarget);
  CHECK_THROWS_AS(solve_entangle_kappa(-0.1, pulse), InfeasibleTarget);
}

TEST_CASE("uncorrelated trajectories: drive response and near-SQL spread") {
  ScenarioConfig config = base_config(ScenarioId::uncorrelated_trajectory);
  config.n_runs = 10000;
  config.drive = {2.0, 0.0, 0.5, 0};   // displacement 1.0 along X1

  const ScenarioReport report = run_uncorrelated_trajectory(config);
  REQUIRE(report.stats.has_value());
  // Mean endpoint follows the classical drive; X1-X2 picks up the X1 shift.
  CHECK(report.stats->mean_endpoint[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(report.stats->mean_endpoint[1] == doctest::Approx(0.0).epsilon(0.05));
  CHECK(report.stats->std_ratio_to_sql == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("finite readout strength adds meter noise above the SQL circle") {
  ScenarioConfig config = base_config(ScenarioId::uncorrelated_trajectory);
  config.n_runs = 10000;
  config.drive.amplitude = 0.0;
  config.readout_pulse.kappa = 1.0;   // R_eff = 2 Vm / kappa^2 = 1 per combination

  const ScenarioReport report = run_uncorrelated_trajectory(config);
  // Posterior-predictive variance 1 + R_eff = 2.
  CHECK(report.stats->std_ratio_to_sql ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
}

TEST_CASE("entangled trajectories shrink below the SQL") {
  ScenarioConfig config = base_config(ScenarioId::entangled_trajectory);
  config.n_runs = 10000;
  config.target_delta_epr = 1.4;
  config.drive = {2.0, 0.3, 0.5, 0};

  const ScenarioReport report = run_entangled_trajectory(config);
  REQUIRE(report.stats.has_value());
  REQUIRE(report.solved_entangle_kappa.has_value());
  CHECK(report.stats->std_ratio_to_sql == doctest::Approx(std::sqrt(0.7)).epsilon(0.03));
  // Drive response is unaffected by the entangling step.
  CHECK(report.stats->mean_endpoint[0] ==
        doctest::Approx(1.0 * std::cos(0.3)).epsilon(0.05));
  CHECK(report.stats->mean_endpoint[1] ==
        doctest::Approx(1.0 * std::sin(0.3)).epsilon(0.1));
}

TEST_CASE("target Delta_EPR = 2 reduces to the uncorrelated scenario") {
  ScenarioConfig config = base_config(ScenarioId::entangled_trajectory);
  config.target_delta_epr = 2.0;
  config.n_runs = 5000;
  const ScenarioReport entangled = run_entangled_trajectory(config);

  ScenarioConfig flat = base_config(ScenarioId::uncorrelated_trajectory);
  flat.n_runs = 5000;
  const ScenarioReport uncorrelated = run_uncorrelated_trajectory(flat);

  CHECK(entangled.stats->std_ratio_to_sql ==
        doctest::Approx(uncorrelated.stats->std_ratio_to_sql).epsilon(0.05));
}

TEST_CASE("deeper entanglement targets give smaller trajectory spread") {
  double prev = 2.0;
  for (const double target : {1.8, 1.4, 1.0}) {
    ScenarioConfig config = base_config(ScenarioId::entangled_trajectory);
    config.n_runs = 4000;
    config.target_delta_epr = target;
    const double ratio = run_entangled_trajectory(config).stats->std_ratio_to_sql;
    CHECK(ratio < 1.0);
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("EPR decay follows the affine relaxation map") {
  ScenarioConfig config = base_config(ScenarioId::epr_decay);
  config.gamma = 0.5;
  config.target_delta_epr = 1.4;

  const ScenarioReport report = run_epr_decay(config);
  REQUIRE(report.epr_series.size() == 50);
  CHECK(report.epr_series.front().report.delta_epr == doctest::Approx(1.4).epsilon(1e-6));
  double prev = 0.0;
  for (const auto& pt : report.epr_series) {
    const double expected =
        1.4 * std::exp(-0.5 * pt.t) + 2.0 * (1.0 - std::exp(-0.5 * pt.t));
    CHECK(std::abs(pt.report.delta_epr - expected) < 2e-6);
    CHECK(pt.report.delta_epr >= prev);   // monotone toward the CSS level 2
    prev = pt.report.delta_epr;
  }
  CHECK(report.epr_series.back().report.delta_epr < 2.0);
  // Long-time limit is the projection-noise level.
  ScenarioConfig late = config;
  late.time_grid = {0.0, 100.0};
  CHECK(run_epr_decay(late).epr_series.back().report.delta_epr ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("mass-sign comparison: flat negative branch, reheating positive branch") {
  ScenarioConfig config = base_config(ScenarioId::mass_sign_comparison);
  config.entangle_pulse.kappa = 3.0;

  const ScenarioReport report = run_mass_sign_comparison(config);
  REQUIRE(!report.mass_series.empty());
  const double flat = report.mass_series.front().var_rel_negative_mass;
  double peak = 0.0;
  for (const auto& pt : report.mass_series) {
    CHECK(pt.var_rel_negative_mass == doctest::Approx(flat).epsilon(1e-8));
    peak = std::max(peak, pt.var_rel_positive_mass);
  }
  // Quarter period: the back-action-inflated conjugate rotates fully in.
  CHECK(peak == doctest::Approx(0.5 + 9.0 * 0.5).epsilon(1e-8));
  CHECK(flat < 0.5);   // conditioned below vacuum
}

TEST_CASE("zero-strength conditioning collapses the two branches") {
  // kappa = 0 is rejected by config validation for this scenario; the
  // physical statement is tested with a negligible coupling instead.
  ScenarioConfig config = base_config(ScenarioId::mass_sign_comparison);
  config.entangle_pulse.kappa = 1e-6;
  const ScenarioReport report = run_mass_sign_comparison(config);
  for (const auto& pt : report.mass_series) {
    CHECK(pt.var_rel_negative_mass == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(pt.var_rel_positive_mass == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("reports are reproducible and thread-count independent") {
  ScenarioConfig config = base_config(ScenarioId::entangled_trajectory);
  config.n_runs = 500;
  const ScenarioReport a = run_entangled_trajectory(config);
  const ScenarioReport b = run_entangled_trajectory(config);
  config.threads = 4;
  const ScenarioReport c = run_entangled_trajectory(config);

  REQUIRE(a.endpoints.size() == b.endpoints.size());
  REQUIRE(a.endpoints.size() == c.endpoints.size());
  for (std::size_t i = 0; i < a.endpoints.size(); ++i) {
    CHECK(a.endpoints[i].x == b.endpoints[i].x);
    CHECK(a.endpoints[i].x == c.endpoints[i].x);
    CHECK(a.endpoints[i].p == c.endpoints[i].p);
  }
}

TEST_CASE("config validation catches bad inputs") {
  ScenarioConfig config = base_config(ScenarioId::epr_decay);
  config.n_runs = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = base_config(ScenarioId::epr_decay);
  config.time_grid = {1.0, 0.5};
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("strictly increasing"),
                       ConfigError);

  config = base_config(ScenarioId::uncorrelated_trajectory);
  config.readout_pulse.kappa = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
