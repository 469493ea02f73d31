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

// Time propagators for free particles and oscillators with signed effective
// mass/frequency, the spin-ensemble <-> canonical-oscillator mapping,
// classical drives, and decoherence.

#include <cmath>
#include <cstddef>
#include <vector>

#include "eprsim/gaussian.hpp"

namespace eprsim {

struct FreeParticleModel {
  std::vector<int> mass_signs;   // one of {+1, -1} per mode
  double mass_magnitude = 1.0;   // shared magnitude, > 0
};

struct OscillatorModel {
  double signed_frequency = 1.0;   // omega > 0 positive mass, omega < 0 negative
  double decoherence_rate = 0.0;   // gamma >= 0, per unit time
  double bath_variance = kVacuumVariance;
};

enum class SpinOrientation { along_B, against_B };

struct SpinEnsembleModel {
  double Jx = 1.0;   // macroscopic spin, treated classically
  SpinOrientation orientation = SpinOrientation::along_B;
};

struct DriveConfig {
  double amplitude = 0.0;   // quadrature displacement rate
  double phase = 0.0;       // rad
  double duration = 0.0;    // tau
  int target_mode = 0;
};

/// X_i(t) = X_i(0) + t P_i(0)/(sign_i m), P_i(t) = P_i(0).
inline SymplecticMatrix free_propagator(double t, const FreeParticleModel& model) {
  if (model.mass_magnitude <= 0.0)
    throw InvalidArgument("free_propagator: mass magnitude must be > 0");
  if (model.mass_signs.empty())
    throw InvalidArgument("free_propagator: no modes");
  const int n = static_cast<int>(model.mass_signs.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const int sign = model.mass_signs[static_cast<std::size_t>(m)];
    if (sign != 1 && sign != -1)
      throw InvalidArgument("free_propagator: mass sign must be +1 or -1");
    s(2 * m, 2 * m + 1) = t / (sign * model.mass_magnitude);
  }
  return SymplecticMatrix(std::move(s));
}

/// Phase-space rotation by omega_i t per mode, with the sign of omega_i:
/// X(t) = X cos(wt) + P sin(wt), P(t) = P cos(wt) - X sin(wt).
inline SymplecticMatrix oscillator_propagator(double t,
                                              const std::vector<OscillatorModel>& models) {
  if (models.empty()) throw InvalidArgument("oscillator_propagator: no modes");
  const int n = static_cast<int>(models.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const double angle = models[static_cast<std::size_t>(m)].signed_frequency * t;
    const double c = std::cos(angle);
    const double d = std::sin(angle);
    s(2 * m, 2 * m) = c;
    s(2 * m, 2 * m + 1) = d;
    s(2 * m + 1, 2 * m) = -d;
    s(2 * m + 1, 2 * m + 1) = c;
  }
  return SymplecticMatrix(std::move(s));
}

/// Canonical quadratures of a spin ensemble: X = +-Jy/sqrt(Jx) (minus for
/// the ensemble polarized against the field), P = Jz/sqrt(Jx).
inline std::pair<double, double> spin_to_canonical(double Jy, double Jz,
                                                   const SpinEnsembleModel& ensemble) {
  if (ensemble.Jx <= 0.0)
    throw InvalidArgument("spin_to_canonical: Jx must be > 0");
  const double root = std::sqrt(ensemble.Jx);
  const double sign = ensemble.orientation == SpinOrientation::against_B ? -1.0 : 1.0;
  return {sign * Jy / root, Jz / root};
}

/// Rotating-frame mean displacement accumulated over the drive duration.
inline Eigen::VectorXd drive_displacement(const DriveConfig& drive, int n_modes) {
  if (drive.target_mode < 0 || drive.target_mode >= n_modes)
    throw InvalidArgument("drive_displacement: target mode out of range");
  if (drive.duration < 0.0)
    throw InvalidArgument("drive_displacement: duration must be >= 0");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * n_modes);
  const double r = drive.amplitude * drive.duration;
  d(2 * drive.target_mode) = r * std::cos(drive.phase);
  d(2 * drive.target_mode + 1) = r * std::sin(drive.phase);
  return d;
}

/// Exponential relaxation toward an uncorrelated bath state, per mode:
/// mean *= e^{-gamma dt/2}, cov -> e^{-gamma dt} cov + (1-e^{-gamma dt}) V_bath I
/// applied blockwise (cross-mode blocks decay with the geometric mean factor).
inline GaussianState decohere(const GaussianState& state,
                              const std::vector<OscillatorModel>& models, double dt) {
  if (dt < 0.0) throw InvalidArgument("decohere: dt must be >= 0");
  if (static_cast<int>(models.size()) != state.n_modes())
    throw InvalidArgument("decohere: model count must match mode count");
  const int d = state.dim();
  Eigen::VectorXd decay(d);     // e^{-gamma dt/2} per quadrature
  Eigen::VectorXd bath(d);
  for (int m = 0; m < state.n_modes(); ++m) {
    const auto& model = models[static_cast<std::size_t>(m)];
    if (model.decoherence_rate < 0.0)
      throw InvalidArgument("decohere: decoherence rate must be >= 0");
    if (model.bath_variance < kVacuumVariance)
      throw InvalidArgument("decohere: bath variance must be >= 1/2");
    const double f = std::exp(-0.5 * model.decoherence_rate * dt);
    decay(2 * m) = decay(2 * m + 1) = f;
    bath(2 * m) = bath(2 * m + 1) = model.bath_variance;
  }
  const Eigen::VectorXd mean = decay.cwiseProduct(state.mean());
  Eigen::MatrixXd cov = decay.asDiagonal() * state.cov() * decay.asDiagonal();
  cov += (Eigen::VectorXd::Ones(d) - decay.cwiseAbs2()).cwiseProduct(bath).asDiagonal();
  return GaussianState(mean, cov);
}

}  // namespace eprsim
