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

// QND light-pulse measurements of joint quadratures with explicit meter
// dilation, Gaussian conditioning on outcomes, and time-continuous
// conditioning via a Riccati update.
//
// A pulse is always modeled by appending meter modes, applying the
// entangling symplectic, homodyning the meter, conditioning, and discarding
// the meter. The coupling acts on the normalized combination c/|c|, so a
// channel of strength kappa reads c^T r /|c| with additive noise
// meter_variance/kappa^2 and inflates the Omega-conjugate normalized
// combination by exactly kappa^2 * meter_variance.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "eprsim/gaussian.hpp"
#include "eprsim/rng.hpp"

namespace eprsim {

struct MeasurementChannel {
  QuadratureCombination combination;
  double kappa = 1.0;            // dimensionless coupling per pulse, >= 0
  double meter_variance = kVacuumVariance;
  double efficiency = 1.0;       // in (0, 1]

  void validate() const {
    if (kappa < 0.0) throw InvalidArgument("MeasurementChannel: kappa must be >= 0");
    if (meter_variance < kVacuumVariance)
      throw InvalidArgument("MeasurementChannel: meter variance must be >= 1/2");
    if (efficiency <= 0.0 || efficiency > 1.0)
      throw InvalidArgument("MeasurementChannel: efficiency must be in (0, 1]");
  }

  /// Extra readout noise from detection loss, modeled as a beam-splitter on
  /// the meter before homodyning (vacuum admixture rescaled to unit gain).
  [[nodiscard]] double loss_noise() const {
    return kVacuumVariance * (1.0 - efficiency) / efficiency;
  }

  /// Readout noise on the calibrated combination c^T r for kappa > 0.
  [[nodiscard]] double effective_readout_variance() const {
    const double n2 = combination.coeffs().squaredNorm();
    return n2 * (meter_variance + loss_noise()) / (kappa * kappa);
  }
};

struct MeasurementRecord {
  struct Outcome {
    int channel = 0;
    double value = 0.0;   // calibrated to c^T r units when kappa > 0
    double time = 0.0;
  };
  std::vector<Outcome> outcomes;
};

/// Posterior mean/covariance given readout y = C r + noise, noise ~ N(0, R).
inline GaussianState condition_on_outcome(const GaussianState& state,
                                          const Eigen::MatrixXd& C,
                                          const Eigen::MatrixXd& R,
                                          const Eigen::VectorXd& y) {
  const auto k = C.rows();
  if (C.cols() != state.dim())
    throw InvalidArgument("condition_on_outcome: sensing-row dimension mismatch");
  if (R.rows() != k || R.cols() != k || y.size() != k)
    throw InvalidArgument("condition_on_outcome: readout dimension mismatch");
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw InvalidArgument("condition_on_outcome: R not symmetric");

  const Eigen::MatrixXd cross = state.cov() * C.transpose();
  Eigen::MatrixXd innovation = C * cross + R;
  innovation = 0.5 * (innovation + innovation.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(innovation);
  if (es.info() != Eigen::Success)
    throw NumericalError("condition_on_outcome: innovation eigensolver failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    std::ostringstream msg;
    msg << "condition_on_outcome: singular innovation matrix, condition number "
        << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd inv = es.eigenvectors() *
                              es.eigenvalues().cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose();

  const Eigen::VectorXd mean = state.mean() + cross * inv * (y - C * state.mean());
  Eigen::MatrixXd cov = state.cov() - cross * inv * cross.transpose();
  cov = 0.5 * (cov + cov.transpose().eval());
  return GaussianState(mean, cov);
}

/// Draw y ~ N(C mean, C cov C^T + R). Deterministic given the stream state.
inline Eigen::VectorXd sample_outcome(const GaussianState& state,
                                      const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& R, RandomStream& rng) {
  const auto k = C.rows();
  if (C.cols() != state.dim())
    throw InvalidArgument("sample_outcome: sensing-row dimension mismatch");
  if (R.rows() != k || R.cols() != k)
    throw InvalidArgument("sample_outcome: readout dimension mismatch");
  Eigen::MatrixXd cov = C * state.cov() * C.transpose() + R;
  cov = 0.5 * (cov + cov.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw NumericalError("sample_outcome: outcome eigensolver failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return C * state.mean() +
         es.eigenvectors() * root.cwiseProduct(rng.normal_vector(static_cast<int>(k)));
}

namespace detail {

/// Entangling symplectic on system + k meters: meter X_j picks up
/// kappa_j (c_j^T r)/|c_j|; the system picks up kappa_j Omega c_j/|c_j| times
/// meter P_j. Exact time-1 flow because the channel set commutes.
inline SymplecticMatrix pulse_entangler(int n_sys_modes,
                                        const std::vector<MeasurementChannel>& channels) {
  const int k = static_cast<int>(channels.size());
  const int d_sys = 2 * n_sys_modes;
  const int d = d_sys + 2 * k;
  const Eigen::MatrixXd omega = symplectic_form(n_sys_modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(d, d);
  for (int j = 0; j < k; ++j) {
    const auto& ch = channels[static_cast<std::size_t>(j)];
    const Eigen::VectorXd chat = ch.combination.coeffs() / ch.combination.norm();
    const int xm = d_sys + 2 * j;
    const int pm = d_sys + 2 * j + 1;
    s.row(xm).head(d_sys) = ch.kappa * chat.transpose();
    s.col(pm).head(d_sys) = ch.kappa * (omega * chat);
  }
  return SymplecticMatrix(std::move(s));
}

}  // namespace detail

/// One QND pulse carrying one or more mutually commuting channels.
inline std::pair<MeasurementRecord, GaussianState> qnd_pulse(
    const GaussianState& state, const std::vector<MeasurementChannel>& channels,
    RandomStream& rng, double time = 0.0) {
  if (channels.empty()) throw InvalidArgument("qnd_pulse: no channels");
  const int k = static_cast<int>(channels.size());
  for (const auto& ch : channels) {
    ch.validate();
    if (ch.combination.dim() != state.dim())
      throw InvalidArgument("qnd_pulse: channel dimension mismatch");
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const double ip = symplectic_inner_product(
          channels[static_cast<std::size_t>(a)].combination,
          channels[static_cast<std::size_t>(b)].combination);
      if (std::abs(ip) > 1e-10) {
        std::ostringstream msg;
        msg << "qnd_pulse: channels " << a << " and " << b
            << " do not commute, symplectic inner product " << ip;
        throw InvalidArgument(msg.str());
      }
    }

  const int d_sys = state.dim();
  const int d = d_sys + 2 * k;

  // Dilation: meter modes in vacuum-like states of the channel meter variance.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  mean.head(d_sys) = state.mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  cov.topLeftCorner(d_sys, d_sys) = state.cov();
  for (int j = 0; j < k; ++j) {
    const double vm = channels[static_cast<std::size_t>(j)].meter_variance;
    cov(d_sys + 2 * j, d_sys + 2 * j) = vm;
    cov(d_sys + 2 * j + 1, d_sys + 2 * j + 1) = vm;
  }
  GaussianState extended(mean, cov);
  extended = apply_symplectic(extended, detail::pulse_entangler(state.n_modes(), channels));

  // Homodyne the meter X quadratures; loss enters as extra readout noise.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, d);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) {
    C(j, d_sys + 2 * j) = 1.0;
    R(j, j) = channels[static_cast<std::size_t>(j)].loss_noise();
  }
  const Eigen::VectorXd y = sample_outcome(extended, C, R, rng);
  extended = condition_on_outcome(extended, C, R, y);

  // Discard the meter: Gaussian marginal over the system block.
  GaussianState posterior(extended.mean().head(d_sys),
                          extended.cov().topLeftCorner(d_sys, d_sys));

  MeasurementRecord record;
  record.outcomes.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const auto& ch = channels[static_cast<std::size_t>(j)];
    const double value =
        ch.kappa > 0.0 ? ch.combination.norm() * y(j) / ch.kappa : y(j);
    record.outcomes.push_back({j, value, time});
  }
  return {std::move(record), std::move(posterior)};
}

/// Linear-Gaussian continuous monitoring model.
struct ContinuousModel {
  Eigen::MatrixXd drift;       // A, per unit time
  Eigen::MatrixXd diffusion;   // D, PSD, per unit time
  Eigen::MatrixXd sensing;     // C, k x 2N
  Eigen::MatrixXd readout_noise;   // R, positive definite

  void validate(int dim) const {
    if (drift.rows() != dim || drift.cols() != dim)
      throw InvalidArgument("ContinuousModel: drift dimension mismatch");
    if (diffusion.rows() != dim || diffusion.cols() != dim)
      throw InvalidArgument("ContinuousModel: diffusion dimension mismatch");
    if (sensing.cols() != dim)
      throw InvalidArgument("ContinuousModel: sensing dimension mismatch");
    const auto k = sensing.rows();
    if (readout_noise.rows() != k || readout_noise.cols() != k)
      throw InvalidArgument("ContinuousModel: readout noise dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(readout_noise);
    if (llt.info() != Eigen::Success)
      throw InvalidArgument("ContinuousModel: readout noise must be positive definite");
  }
};

/// Fixed-step conditional evolution: explicit Riccati update for the
/// measurement and diffusion terms, with the drift applied as its exact
/// one-step propagator so the unmonitored limit reproduces unitary motion.
inline std::pair<std::vector<GaussianState>, MeasurementRecord> continuous_condition(
    const GaussianState& state, const ContinuousModel& model, double dt,
    int n_steps, RandomStream& rng) {
  if (dt <= 0.0) throw InvalidArgument("continuous_condition: dt must be > 0");
  if (n_steps < 1) throw InvalidArgument("continuous_condition: n_steps must be >= 1");
  model.validate(state.dim());

  const Eigen::MatrixXd& D = model.diffusion;
  const Eigen::MatrixXd& C = model.sensing;
  const Eigen::MatrixXd phi = (model.drift * dt).exp();   // exact drift step
  const Eigen::MatrixXd Rinv = model.readout_noise.inverse();
  const Eigen::MatrixXd noise_root = [&] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.readout_noise / dt);
    return Eigen::MatrixXd(es.eigenvectors() *
                           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                           es.eigenvectors().transpose());
  }();
  const int k = static_cast<int>(C.rows());

  std::vector<GaussianState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(n_steps) + 1);
  trajectory.push_back(state);
  MeasurementRecord record;

  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  for (int step = 0; step < n_steps; ++step) {
    const Eigen::VectorXd y = C * mean + noise_root * rng.normal_vector(k);
    const Eigen::MatrixXd gain = cov * C.transpose() * Rinv;
    mean += dt * gain * (y - C * mean);
    cov += dt * (D - gain * C * cov);
    mean = phi * mean;
    cov = phi * cov * phi.transpose();
    cov = 0.5 * (cov + cov.transpose().eval());

    // Discretization dips of order dt^2 below the quantum floor are expected
    // and harmless; a covariance losing positive-semidefiniteness is not.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cov_es(cov);
    if (cov_es.info() != Eigen::Success ||
        cov_es.eigenvalues().minCoeff() < -kPhysicalityTol) {
      std::ostringstream msg;
      msg << "continuous_condition: covariance lost positivity at step " << step
          << "; reduce dt";
      throw StepSizeError(msg.str());
    }
    GaussianState next(mean, cov);
    const double t = dt * (step + 1);
    for (int j = 0; j < k; ++j) record.outcomes.push_back({j, y(j), t});
    trajectory.push_back(std::move(next));
  }
  return {std::move(trajectory), std::move(record)};
}

}  // namespace eprsim
