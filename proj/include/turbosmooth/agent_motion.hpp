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

#ifndef TURBOSMOOTH_AGENT_MOTION_HPP
#define TURBOSMOOTH_AGENT_MOTION_HPP

#include <cstdint>
#include <optional>

#include "turbosmooth/clg_model.hpp"

namespace turbosmooth {

/// Two-dimensional agent pulled towards the origin.
///
/// State x = [v; p] (velocity first). Velocity is the linear block, position
/// the nonlinear one:
///   v' = rho v + Ts a(p) + (1 - rho) n_v
///   p' = p + Ts v + Ts^2 / 2 a(p) + n_p
///   y  = x + e
struct AgentMotionParams {
  double rho = 0.995;
  double ts = 0.01;
  double sigma_p = 5e-3;
  double sigma_ev = 2e-2;
  double sigma_ep = 2e-2;
  double a0 = 0.5;
  double d0 = 5e-3;
  Eigen::Vector2d p0{0.01, 0.01};
  Eigen::Vector2d v0{0.01, 0.01};
  /// When set, replaces v0 with speed * (1, 1) / sqrt(2).
  std::optional<double> v0_speed;

  /// Throws DimensionMismatch or NonPositiveNoise on out-of-range values.
  void validate() const;
  [[nodiscard]] Eigen::Vector2d initial_velocity() const;
};

/// a(p) = -a0 p / |p| / (1 + (|p| / d0)^2), with a(0) = 0.
Eigen::Vector2d acceleration(const AgentMotionParams& params, const Eigen::Vector2d& p);

/// d a / d p (2 x 2); zero at the origin.
Eigen::Matrix2d acceleration_jacobian(const AgentMotionParams& params, const Eigen::Vector2d& p);

/// Deterministic initial state [v0; p0].
Vector agent_initial_state(const AgentMotionParams& params);

/// Ground-truth trajectory of T steps starting at agent_initial_state().
SimulatedTrajectory simulate(const AgentMotionParams& params, std::size_t horizon,
                             std::uint64_t seed);

/// The agent model in CLG form with analytic Jacobians. The prior is
/// N([v0; p0], diag(sigma_ev^2 I, sigma_ep^2 I)).
ClgModel agent_clg_spec(const AgentMotionParams& params);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_AGENT_MOTION_HPP
