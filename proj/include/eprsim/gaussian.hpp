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

// Phase-space representation of multimode Gaussian states.
//
// Conventions (fixed globally):
//   * quadrature ordering (X1, P1, X2, P2, ...), index = 2*mode + (0 for X,
//     1 for P)
//   * hbar = 1, [X, P] = i, vacuum variance 1/2 per quadrature
//   * symplectic form Omega = blkdiag([[0, 1], [-1, 0]], ...)

#include <Eigen/Dense>
#include <complex>
#include <sstream>
#include <string>
#include <utility>

#include "eprsim/errors.hpp"

namespace eprsim {

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kSymplecticTol = 1e-10;
inline constexpr double kPhysicalityTol = 1e-9;

enum class QuadratureKind { position, momentum };

struct QuadratureIndex {
  int mode = 0;
  QuadratureKind kind = QuadratureKind::position;

  [[nodiscard]] int flat() const {
    return 2 * mode + (kind == QuadratureKind::momentum ? 1 : 0);
  }
};

/// Standard symplectic form for n modes in (X, P) interleaved ordering.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw InvalidArgument("symplectic_form: n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

/// Mean quadrature vector plus covariance matrix over N modes; the sole
/// carrier of quantum statistics.
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto dim = mean_.size();
    if (dim < 2 || dim % 2 != 0)
      throw InvalidArgument("GaussianState: dimension must be even and >= 2");
    if (cov_.rows() != dim || cov_.cols() != dim)
      throw InvalidArgument("GaussianState: mean/cov dimension mismatch");
    const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      std::ostringstream msg;
      msg << "GaussianState: covariance not symmetric, residual " << asym;
      throw InvalidArgument(msg.str());
    }
    cov_ = 0.5 * (cov_ + cov_.transpose().eval());
  }

  [[nodiscard]] int n_modes() const { return static_cast<int>(mean_.size()) / 2; }
  [[nodiscard]] int dim() const { return static_cast<int>(mean_.size()); }
  [[nodiscard]] const Eigen::VectorXd& mean() const { return mean_; }
  [[nodiscard]] const Eigen::MatrixXd& cov() const { return cov_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Smallest eigenvalue of the Hermitian matrix cov + (i/2) Omega.
/// Non-negative (up to tolerance) iff the state is physical.
inline double min_physicality_eigenvalue(const GaussianState& state) {
  const int d = state.dim();
  const std::complex<double> half_i(0.0, 0.5);
  Eigen::MatrixXcd h = state.cov().cast<std::complex<double>>() +
                       half_i * symplectic_form(state.n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("min_physicality_eigenvalue: eigensolver failed");
  (void)d;
  return es.eigenvalues().minCoeff();
}

inline bool is_physical(const GaussianState& state) {
  return min_physicality_eigenvalue(state) > -kPhysicalityTol;
}

/// Linear phase-space propagator; construction verifies S Omega S^T = Omega.
class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(Eigen::MatrixXd s) : s_(std::move(s)) {
    const auto dim = s_.rows();
    if (dim < 2 || dim % 2 != 0 || s_.cols() != dim)
      throw InvalidArgument("SymplecticMatrix: must be square with even dimension");
    const Eigen::MatrixXd omega = symplectic_form(static_cast<int>(dim) / 2);
    const double residual =
        (s_ * omega * s_.transpose() - omega).cwiseAbs().maxCoeff();
    if (residual > kSymplecticTol) {
      std::ostringstream msg;
      msg << "SymplecticMatrix: S Omega S^T != Omega, residual " << residual;
      throw InvalidArgument(msg.str());
    }
  }

  [[nodiscard]] int n_modes() const { return static_cast<int>(s_.rows()) / 2; }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return s_; }

  static SymplecticMatrix identity(int n_modes) {
    return SymplecticMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

 private:
  Eigen::MatrixXd s_;
};

/// Two-mode squeezer acting on modes 0 and 1: squeezes X1-X2 and P1+P2 by
/// e^{-r}, anti-squeezes the conjugate pair.
inline SymplecticMatrix two_mode_squeezer(double r) {
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
  s(0, 0) = ch; s(0, 2) = sh;
  s(2, 2) = ch; s(2, 0) = sh;
  s(1, 1) = ch; s(1, 3) = -sh;
  s(3, 3) = ch; s(3, 1) = -sh;
  return SymplecticMatrix(std::move(s));
}

/// Coefficients of a linear functional of quadratures (e.g. X1 - X2).
class QuadratureCombination {
 public:
  explicit QuadratureCombination(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {
    if (c_.size() < 2 || c_.size() % 2 != 0)
      throw InvalidArgument("QuadratureCombination: dimension must be even and >= 2");
    if (c_.isZero(0.0))
      throw InvalidArgument("QuadratureCombination: coefficient vector is zero");
  }

  [[nodiscard]] const Eigen::VectorXd& coeffs() const { return c_; }
  [[nodiscard]] int dim() const { return static_cast<int>(c_.size()); }
  [[nodiscard]] double norm() const { return c_.norm(); }

  static QuadratureCombination single(QuadratureIndex q, int n_modes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n_modes);
    c(q.flat()) = 1.0;
    return QuadratureCombination(std::move(c));
  }

  /// X_a - X_b
  static QuadratureCombination relative_position(int a, int b, int n_modes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n_modes);
    c(2 * a) = 1.0;
    c(2 * b) = -1.0;
    return QuadratureCombination(std::move(c));
  }

  /// P_a + P_b
  static QuadratureCombination momentum_sum(int a, int b, int n_modes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n_modes);
    c(2 * a + 1) = 1.0;
    c(2 * b + 1) = 1.0;
    return QuadratureCombination(std::move(c));
  }

  /// P_a - P_b (back-action partner of X_a - X_b)
  static QuadratureCombination momentum_difference(int a, int b, int n_modes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n_modes);
    c(2 * a + 1) = 1.0;
    c(2 * b + 1) = -1.0;
    return QuadratureCombination(std::move(c));
  }

  /// X_a + X_b (back-action partner of P_a + P_b)
  static QuadratureCombination position_sum(int a, int b, int n_modes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n_modes);
    c(2 * a) = 1.0;
    c(2 * b) = 1.0;
    return QuadratureCombination(std::move(c));
  }

 private:
  Eigen::VectorXd c_;
};

/// c1^T Omega c2; zero iff the two combinations commute as operators.
inline double symplectic_inner_product(const QuadratureCombination& c1,
                                       const QuadratureCombination& c2) {
  if (c1.dim() != c2.dim())
    throw InvalidArgument("symplectic_inner_product: dimension mismatch");
  return c1.coeffs().dot(symplectic_form(c1.dim() / 2) * c2.coeffs());
}

inline GaussianState vacuum_state(int n_modes) {
  if (n_modes < 1) throw InvalidArgument("vacuum_state: n_modes must be >= 1");
  return GaussianState(
      Eigen::VectorXd::Zero(2 * n_modes),
      kVacuumVariance * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

inline GaussianState displace(const GaussianState& state,
                              const Eigen::VectorXd& offset) {
  if (offset.size() != state.dim())
    throw InvalidArgument("displace: offset dimension mismatch");
  return GaussianState(state.mean() + offset, state.cov());
}

inline GaussianState apply_symplectic(const GaussianState& state,
                                      const SymplecticMatrix& s) {
  if (s.n_modes() != state.n_modes())
    throw InvalidArgument("apply_symplectic: mode count mismatch");
  const Eigen::MatrixXd& m = s.matrix();
  return GaussianState(m * state.mean(), m * state.cov() * m.transpose());
}

/// Mean and variance of the linear functional c^T r on the state.
inline std::pair<double, double> functional_stats(const GaussianState& state,
                                                  const QuadratureCombination& c) {
  if (c.dim() != state.dim())
    throw InvalidArgument("functional_stats: dimension mismatch");
  const double mean = c.coeffs().dot(state.mean());
  const double var = c.coeffs().dot(state.cov() * c.coeffs());
  return {mean, var};
}

}  // namespace eprsim
