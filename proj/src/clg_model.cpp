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

#include "turbosmooth/clg_model.hpp"

#include <cmath>
#include <string>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/random.hpp"

namespace turbosmooth {

namespace {

void expect_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
}

void expect_size(const Vector& v, Index size, const char* what) {
  if (v.size() != size) {
    throw DimensionMismatch(std::string(what) + ": expected size " + std::to_string(size) +
                            ", got " + std::to_string(v.size()));
  }
}

void expect_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NonPositiveNoise(std::string(what) + " is not positive definite");
  }
}

/// Square root factor S with S S^T = a, tolerating positive semidefinite a.
Matrix psd_sqrt(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

Matrix ClgModel::process_cov() const {
  Matrix c = Matrix::Zero(dim(), dim());
  c.topLeftCorner(dim_linear, dim_linear) = cov_linear;
  c.bottomRightCorner(dim_nonlinear, dim_nonlinear) = cov_nonlinear;
  return c;
}

void ClgModel::validate() const {
  if (dim_linear <= 0 || dim_nonlinear <= 0 || dim_measurement <= 0) {
    throw DimensionMismatch("model dimensions must be positive");
  }
  if (!a_linear || !a_nonlinear || !f_linear || !f_nonlinear || !g || !b) {
    throw DimensionMismatch("model callables are not all set");
  }
  expect_shape(cov_linear, dim_linear, dim_linear, "C_w^L");
  expect_shape(cov_nonlinear, dim_nonlinear, dim_nonlinear, "C_w^N");
  expect_shape(cov_measurement, dim_measurement, dim_measurement, "C_e");
  expect_spd(cov_linear, "C_w^L");
  expect_spd(cov_nonlinear, "C_w^N");
  expect_spd(cov_measurement, "C_e");
  if (prior.dim() != dim()) {
    throw DimensionMismatch("prior dimension does not match the state");
  }
  const GaussianMessage p = prior.to_moment();
  const Vector xn = p.mean().segment(dim_linear, dim_nonlinear);
  expect_shape(a_linear(xn), dim_linear, dim_linear, "A_L");
  expect_shape(a_nonlinear(xn), dim_nonlinear, dim_linear, "A_N");
  expect_size(f_linear(xn), dim_linear, "f_L");
  expect_size(f_nonlinear(xn), dim_nonlinear, "f_N");
  expect_size(g(xn), dim_measurement, "g");
  expect_shape(b(xn), dim_measurement, dim_linear, "B");
}

Vector full_drift(const ClgModel& model, const Vector& x) {
  expect_size(x, model.dim(), "state");
  const Vector xl = x.head(model.dim_linear);
  const Vector xn = x.tail(model.dim_nonlinear);
  Vector out(model.dim());
  out.head(model.dim_linear) = model.a_linear(xn) * xl + model.f_linear(xn);
  out.tail(model.dim_nonlinear) = model.a_nonlinear(xn) * xl + model.f_nonlinear(xn);
  return out;
}

Vector measurement_mean(const ClgModel& model, const Vector& x) {
  expect_size(x, model.dim(), "state");
  const Vector xn = x.tail(model.dim_nonlinear);
  return model.b(xn) * x.head(model.dim_linear) + model.g(xn);
}

Matrix numeric_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x) {
  const Vector f0 = fn(x);
  Matrix jac(f0.size(), x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const Vector up = fn(probe);
    probe[i] = x[i] - h;
    const Vector down = fn(probe);
    probe[i] = x[i];
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

void linearize_drift(const ClgModel& model, const Vector& x_fe, LinearizedModel& out) {
  auto drift = [&model](const Vector& x) { return full_drift(model, x); };
  out.transition = model.drift_jacobian ? model.drift_jacobian(x_fe) : numeric_jacobian(drift, x_fe);
  expect_shape(out.transition, model.dim(), model.dim(), "drift Jacobian");
  if (!out.transition.allFinite()) {
    throw NonFiniteJacobian("drift Jacobian is not finite");
  }
  out.offset = full_drift(model, x_fe) - out.transition * x_fe;
}

void linearize_measurement(const ClgModel& model, const Vector& x_fp, LinearizedModel& out) {
  auto h = [&model](const Vector& x) { return measurement_mean(model, x); };
  const Matrix jac =
      model.measurement_jacobian ? model.measurement_jacobian(x_fp) : numeric_jacobian(h, x_fp);
  expect_shape(jac, model.dim_measurement, model.dim(), "measurement Jacobian");
  if (!jac.allFinite()) {
    throw NonFiniteJacobian("measurement Jacobian is not finite");
  }
  out.measurement = jac.transpose();
  out.measurement_offset = measurement_mean(model, x_fp) - jac * x_fp;
}

LinearizedModel linearize(const ClgModel& model, const Vector& x_fe, const Vector& x_fp) {
  LinearizedModel lin;
  linearize_drift(model, x_fe, lin);
  linearize_measurement(model, x_fp, lin);
  return lin;
}

ClgModel make_linear_clg(const LinearClgParams& p) {
  ClgModel m;
  m.dim_linear = p.a_linear.rows();
  m.dim_nonlinear = p.a_nonlinear.rows();
  m.dim_measurement = p.b.rows();
  const Index dl = m.dim_linear;
  const Index dn = m.dim_nonlinear;
  const Index dp = m.dim_measurement;
  expect_shape(p.a_linear, dl, dl, "A_L");
  expect_shape(p.a_nonlinear, dn, dl, "A_N");
  expect_shape(p.b, dp, dl, "B");
  expect_size(p.f_linear, dl, "f_L");
  expect_size(p.f_nonlinear, dn, "f_N");
  expect_size(p.g, dp, "g");
  auto gain = [dn](const Matrix& k, Index rows, const char* what) {
    if (k.size() == 0) {
      return Matrix(Matrix::Zero(rows, dn));
    }
    expect_shape(k, rows, dn, what);
    return k;
  };
  const Matrix kl = gain(p.f_linear_gain, dl, "f_L gain");
  const Matrix kn = gain(p.f_nonlinear_gain, dn, "f_N gain");
  const Matrix kg = gain(p.g_gain, dp, "g gain");

  m.a_linear = [a = p.a_linear](const Vector&) { return a; };
  m.a_nonlinear = [a = p.a_nonlinear](const Vector&) { return a; };
  m.b = [b = p.b](const Vector&) { return b; };
  m.f_linear = [k = kl, c = p.f_linear](const Vector& xn) -> Vector { return k * xn + c; };
  m.f_nonlinear = [k = kn, c = p.f_nonlinear](const Vector& xn) -> Vector { return k * xn + c; };
  m.g = [k = kg, c = p.g](const Vector& xn) -> Vector { return k * xn + c; };
  m.cov_linear = p.cov_linear;
  m.cov_nonlinear = p.cov_nonlinear;
  m.cov_measurement = p.cov_measurement;
  m.prior = GaussianMessage::from_moments(p.prior_mean, p.prior_cov);

  Matrix f(dl + dn, dl + dn);
  f << p.a_linear, kl, p.a_nonlinear, kn;
  Matrix h(dp, dl + dn);
  h << p.b, kg;
  m.drift_jacobian = [f](const Vector&) { return f; };
  m.measurement_jacobian = [h](const Vector&) { return h; };
  m.validate();
  return m;
}

SimulatedTrajectory simulate_clg(const ClgModel& model, const Vector& initial_state,
                                 std::size_t horizon, std::uint64_t seed) {
  expect_size(initial_state, model.dim(), "initial state");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
      v[i] = normal(rng);
    }
    return v;
  };
  const Matrix process_sqrt = psd_sqrt(model.process_cov());
  const Matrix noise_sqrt = psd_sqrt(model.cov_measurement);

  SimulatedTrajectory traj;
  traj.seed = seed;
  traj.states.reserve(horizon);
  traj.measurements.reserve(horizon);
  Vector x = initial_state;
  for (std::size_t l = 0; l < horizon; ++l) {
    traj.states.push_back(x);
    traj.measurements.push_back(measurement_mean(model, x) + noise_sqrt * draw(model.dim_measurement));
    x = full_drift(model, x) + process_sqrt * draw(model.dim());
  }
  return traj;
}

}  // namespace turbosmooth
