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

#include "turbosmooth/agent_motion.hpp"

#include <cmath>
#include <random>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/random.hpp"

namespace turbosmooth {

void AgentMotionParams::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DimensionMismatch("rho must lie in (0, 1)");
  }
  if (!(ts > 0.0)) {
    throw DimensionMismatch("sampling interval must be positive");
  }
  if (!(sigma_p > 0.0 && sigma_ev > 0.0 && sigma_ep > 0.0)) {
    throw NonPositiveNoise("noise standard deviations must be positive");
  }
  if (!(d0 > 0.0) || !std::isfinite(a0)) {
    throw DimensionMismatch("d0 must be positive and a0 finite");
  }
}

Eigen::Vector2d AgentMotionParams::initial_velocity() const {
  if (v0_speed) {
    return Eigen::Vector2d::Constant(*v0_speed / std::sqrt(2.0));
  }
  return v0;
}

Eigen::Vector2d acceleration(const AgentMotionParams& params, const Eigen::Vector2d& p) {
  const double r = p.norm();
  if (r == 0.0) {
    return Eigen::Vector2d::Zero();
  }
  const double q = r / params.d0;
  return -params.a0 * (p / r) / (1.0 + q * q);
}

Eigen::Matrix2d acceleration_jacobian(const AgentMotionParams& params, const Eigen::Vector2d& p) {
  const double r = p.norm();
  if (r == 0.0) {
    return Eigen::Matrix2d::Zero();
  }
  // a(p) = -a0 s(r) p with s(r) = 1 / (r + r^3 / d0^2).
  const double k = 1.0 / (params.d0 * params.d0);
  const double den = r + r * r * r * k;
  const double s = 1.0 / den;
  const double ds = -(1.0 + 3.0 * r * r * k) / (den * den);
  return -params.a0 * (s * Eigen::Matrix2d::Identity() + (ds / r) * p * p.transpose());
}

Vector agent_initial_state(const AgentMotionParams& params) {
  Vector x(4);
  x << params.initial_velocity(), params.p0;
  return x;
}

SimulatedTrajectory simulate(const AgentMotionParams& params, std::size_t horizon,
                             std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  auto draw2 = [&] {
    const double a = normal(rng);
    const double b = normal(rng);
    return Eigen::Vector2d(a, b);
  };

  SimulatedTrajectory traj;
  traj.seed = seed;
  traj.states.reserve(horizon);
  traj.measurements.reserve(horizon);
  Eigen::Vector2d v = params.initial_velocity();
  Eigen::Vector2d p = params.p0;
  for (std::size_t l = 0; l < horizon; ++l) {
    Vector x(4);
    x << v, p;
    Vector y(4);
    const Eigen::Vector2d ev = params.sigma_ev * draw2();
    const Eigen::Vector2d ep = params.sigma_ep * draw2();
    y << v + ev, p + ep;
    traj.states.push_back(std::move(x));
    traj.measurements.push_back(std::move(y));

    const Eigen::Vector2d a = acceleration(params, p);
    const Eigen::Vector2d nv = draw2();
    const Eigen::Vector2d np = params.sigma_p * draw2();
    const Eigen::Vector2d v_next = params.rho * v + params.ts * a + (1.0 - params.rho) * nv;
    p = p + params.ts * v + 0.5 * params.ts * params.ts * a + np;
    v = v_next;
  }
  return traj;
}

ClgModel agent_clg_spec(const AgentMotionParams& params) {
  params.validate();
  const Matrix i2 = Matrix::Identity(2, 2);
  ClgModel m;
  m.dim_linear = 2;
  m.dim_nonlinear = 2;
  m.dim_measurement = 4;
  m.a_linear = [rho = params.rho, i2](const Vector&) -> Matrix { return rho * i2; };
  m.a_nonlinear = [ts = params.ts, i2](const Vector&) -> Matrix { return ts * i2; };
  m.f_linear = [params](const Vector& p) -> Vector {
    return params.ts * acceleration(params, p.head<2>());
  };
  m.f_nonlinear = [params](const Vector& p) -> Vector {
    return p + 0.5 * params.ts * params.ts * acceleration(params, p.head<2>());
  };
  m.g = [](const Vector& p) -> Vector {
    Vector g = Vector::Zero(4);
    g.tail(2) = p;
    return g;
  };
  m.b = [](const Vector&) -> Matrix {
    Matrix b = Matrix::Zero(4, 2);
    b.topRows(2).setIdentity();
    return b;
  };
  const double q = 1.0 - params.rho;
  m.cov_linear = q * q * i2;
  m.cov_nonlinear = params.sigma_p * params.sigma_p * i2;
  m.cov_measurement = Matrix::Zero(4, 4);
  m.cov_measurement.topLeftCorner(2, 2) = params.sigma_ev * params.sigma_ev * i2;
  m.cov_measurement.bottomRightCorner(2, 2) = params.sigma_ep * params.sigma_ep * i2;
  m.prior = GaussianMessage::from_moments(agent_initial_state(params), m.cov_measurement);

  m.drift_jacobian = [params](const Vector& x) -> Matrix {
    const Eigen::Matrix2d j = acceleration_jacobian(params, x.tail<2>());
    Matrix f(4, 4);
    f.topLeftCorner(2, 2) = params.rho * Eigen::Matrix2d::Identity();
    f.topRightCorner(2, 2) = params.ts * j;
    f.bottomLeftCorner(2, 2) = params.ts * Eigen::Matrix2d::Identity();
    f.bottomRightCorner(2, 2) =
        Eigen::Matrix2d::Identity() + 0.5 * params.ts * params.ts * j;
    return f;
  };
  m.measurement_jacobian = [](const Vector&) -> Matrix { return Matrix::Identity(4, 4); };
  m.validate();
  return m;
}

}  // namespace turbosmooth
