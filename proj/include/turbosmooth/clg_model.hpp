// Copyright 2026 The turbosmooth Authors
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

#ifndef TURBOSMOOTH_CLG_MODEL_HPP
#define TURBOSMOOTH_CLG_MODEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "turbosmooth/gaussian.hpp"

namespace turbosmooth {

/// Conditionally linear Gaussian state-space model.
///
/// The state is x = [x_L; x_N] (linear block first). Given x_N the model is
/// linear-Gaussian in x_L:
///
///   x_L' = A_L(x_N) x_L + f_L(x_N) + w_L,   w_L ~ N(0, C_w^L)
///   x_N' = A_N(x_N) x_L + f_N(x_N) + w_N,   w_N ~ N(0, C_w^N)
///   y    = B(x_N)  x_L + g(x_N)   + e,     e   ~ N(0, C_e)
///
/// Every callable receives the nonlinear block x_N only. The optional
/// Jacobian callables receive the full state; when absent, linearize() falls
/// back to central finite differences.
struct ClgModel {
  using MatrixFn = std::function<Matrix(const Vector&)>;
  using VectorFn = std::function<Vector(const Vector&)>;

  Index dim_linear = 0;
  Index dim_nonlinear = 0;
  Index dim_measurement = 0;

  MatrixFn a_linear;     // D_L x D_L
  MatrixFn a_nonlinear;  // D_N x D_L
  VectorFn f_linear;     // D_L
  VectorFn f_nonlinear;  // D_N
  VectorFn g;            // P
  MatrixFn b;            // P x D_L

  Matrix cov_linear;     // C_w^L
  Matrix cov_nonlinear;  // C_w^N
  Matrix cov_measurement;

  GaussianMessage prior = GaussianMessage::flat(1);

  /// d f / d x at a full state (D x D). Optional.
  MatrixFn drift_jacobian;
  /// d h / d x at a full state (P x D). Optional.
  MatrixFn measurement_jacobian;

  [[nodiscard]] Index dim() const noexcept { return dim_linear + dim_nonlinear; }
  [[nodiscard]] IndexRange linear_block() const noexcept { return {0, dim_linear}; }
  [[nodiscard]] IndexRange nonlinear_block() const noexcept { return {dim_linear, dim_nonlinear}; }

  /// Block-diagonal composition of C_w^L and C_w^N.
  [[nodiscard]] Matrix process_cov() const;

  /// Checks dimensions of the noise covariances, the prior and the callable
  /// outputs at the prior mean. Throws DimensionMismatch or NonPositiveNoise.
  void validate() const;
};

/// Affine approximation of the model around the EKF linearization points:
///   x' ~ F x + u + w,    y ~ H^T x + v + e.
struct LinearizedModel {
  Matrix transition;          // F, D x D
  Vector offset;              // u, D
  Matrix measurement;         // H, D x P
  Vector measurement_offset;  // v, P
};

/// Deterministic one-step drift [A_L x_L + f_L; A_N x_L + f_N].
Vector full_drift(const ClgModel& model, const Vector& x);

/// Noise-free measurement B x_L + g.
Vector measurement_mean(const ClgModel& model, const Vector& x);

/// Central-difference Jacobian with step 1e-6 * (1 + |x_i|).
Matrix numeric_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x);

/// F and u at the forward estimate x_fe.
void linearize_drift(const ClgModel& model, const Vector& x_fe, LinearizedModel& out);
/// H and v at the forward prediction x_fp.
void linearize_measurement(const ClgModel& model, const Vector& x_fp, LinearizedModel& out);

/// Both halves at once. Throws NonFiniteJacobian.
LinearizedModel linearize(const ClgModel& model, const Vector& x_fe, const Vector& x_fp);

/// Parameters of a fully linear CLG model: A_L, A_N, B constant and
/// f_L, f_N, g affine in x_N (offset plus optional gain; an empty gain means
/// zero).
struct LinearClgParams {
  Matrix a_linear, a_nonlinear, b;
  Vector f_linear, f_nonlinear, g;
  Matrix f_linear_gain, f_nonlinear_gain, g_gain;
  Matrix cov_linear, cov_nonlinear, cov_measurement;
  Vector prior_mean;
  Matrix prior_cov;
};

/// Fully linear-Gaussian CLG model with exact analytic Jacobians.
ClgModel make_linear_clg(const LinearClgParams& params);

struct SimulatedTrajectory {
  std::vector<Vector> states;
  std::vector<Vector> measurements;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t horizon() const noexcept { return measurements.size(); }
};

/// Simulates T steps of a generic CLG model starting from `initial_state`.
SimulatedTrajectory simulate_clg(const ClgModel& model, const Vector& initial_state,
                                 std::size_t horizon, std::uint64_t seed);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_CLG_MODEL_HPP
