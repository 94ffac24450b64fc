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


#ifndef TURBOSMOOTH_TESTS_SUPPORT_RANDOM_MODELS_HPP
#define TURBOSMOOTH_TESTS_SUPPORT_RANDOM_MODELS_HPP

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "oracles/kalman.hpp"
#include "turbosmooth/clg_model.hpp"
#include "turbosmooth/smoothers.hpp"

namespace testing_support {

using turbosmooth::Index;
using turbosmooth::Matrix;
using turbosmooth::Vector;

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

/// Well-conditioned SPD matrix: A A^T / n + floor * I.
inline Matrix random_spd(std::mt19937_64& rng, Index n, double floor = 0.1, double scale = 1.0) {
  const Matrix a = random_matrix(rng, n, n);
  Matrix s = scale * (a * a.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n));
  return 0.5 * (s + s.transpose());
}

/// Rescales a square matrix to the given spectral radius bound (largest singular value).
inline Matrix contract(const Matrix& m, double radius) {
  const double s = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  return s > 0.0 ? Matrix(m * (radius / s)) : m;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  return (a - b).norm() / (denom > 0.0 ? denom : 1.0);
}

/// Fully linear CLG model with affine f_L, f_N and g.
inline turbosmooth::LinearClgParams random_linear_params(std::mt19937_64& rng, Index dl, Index dn,
                                                         Index dp) {
  const Index d = dl + dn;
  const Matrix f = contract(random_matrix(rng, d, d), 0.95);
  turbosmooth::LinearClgParams p;
  p.a_linear = f.topLeftCorner(dl, dl);
  p.f_linear_gain = f.topRightCorner(dl, dn);
  p.a_nonlinear = f.bottomLeftCorner(dn, dl);
  p.f_nonlinear_gain = f.bottomRightCorner(dn, dn);
  p.f_linear = random_vector(rng, dl, 0.5);
  p.f_nonlinear = random_vector(rng, dn, 0.5);
  const Matrix h = random_matrix(rng, dp, d);
  p.b = h.leftCols(dl);
  p.g_gain = h.rightCols(dn);
  p.g = random_vector(rng, dp, 0.5);
  p.cov_linear = random_spd(rng, dl, 0.2, 0.1);
  p.cov_nonlinear = random_spd(rng, dn, 0.2, 0.1);
  p.cov_measurement = random_spd(rng, dp, 0.2, 0.2);
  p.prior_mean = random_vector(rng, d);
  p.prior_cov = random_spd(rng, d, 0.5);
  return p;
}

inline oracle::LinearGaussian to_oracle(const turbosmooth::LinearClgParams& p) {
  const Index dl = p.a_linear.rows();
  const Index dn = p.a_nonlinear.rows();
  const Index d = dl + dn;
  oracle::LinearGaussian m;
  m.F.resize(d, d);
  m.F << p.a_linear, p.f_linear_gain, p.a_nonlinear, p.f_nonlinear_gain;
  m.u.resize(d);
  m.u << p.f_linear, p.f_nonlinear;
  m.Q = Matrix::Zero(d, d);
  m.Q.topLeftCorner(dl, dl) = p.cov_linear;
  m.Q.bottomRightCorner(dn, dn) = p.cov_nonlinear;
  m.H.resize(p.b.rows(), d);
  m.H << p.b, p.g_gain;
  m.v = p.g;
  m.R = p.cov_measurement;
  m.m0 = p.prior_mean;
  m.P0 = p.prior_cov;
  return m;
}

struct RtsComparison {
  double mean_error = 0.0;  // max over steps, relative
  double cov_error = 0.0;
  double filter_error = 0.0;
  double seconds = 0.0;
};

/// Runs the particle-free configuration of the marginal smoother on a linear
/// model and compares it with the covariance-form RTS smoother.
inline RtsComparison compare_with_rts(const turbosmooth::LinearClgParams& params,
                                      std::size_t horizon, std::uint64_t seed,
                                      std::size_t num_particles = 20) {
  using namespace turbosmooth;
  const ClgModel model = make_linear_clg(params);
  std::mt19937_64 rng(seed);
  const Vector x1 = params.prior_mean + Eigen::LLT<Matrix>(params.prior_cov).matrixL() *
                                            random_vector(rng, model.dim());
  const SimulatedTrajectory traj = simulate_clg(model, x1, horizon, seed + 1);

  const auto start = std::chrono::steady_clock::now();
  ForwardConfig fc;
  fc.num_particles = num_particles;
  fc.mode = FilterMode::mpf;
  fc.seed = seed + 2;
  const ForwardPass fwd = run_forward(model, traj.measurements, fc);
  StsaConfig sc;
  sc.exchange = false;
  sc.terminal = TerminalInit::measurement_only;
  sc.seed = seed + 3;
  const MarginalSmoothedSet set = run_stsa(model, fwd.records, traj.measurements, sc);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const oracle::LinearGaussian lg = to_oracle(params);
  const oracle::KalmanOutput kf = oracle::kalman_filter(lg, traj.measurements);
  const oracle::SmootherOutput rts = oracle::rts_smoother(lg, kf);

  RtsComparison c;
  c.seconds = seconds;
  for (std::size_t l = 0; l < horizon; ++l) {
    c.mean_error = std::max(c.mean_error, relative_error(set.smoothed[l].mean(), rts.mean[l]));
    c.cov_error = std::max(c.cov_error, relative_error(set.smoothed[l].cov(), rts.cov[l]));
    c.filter_error = std::max(
        c.filter_error, relative_error(fwd.records[l].ekf_estimate.mean(), kf.filt_mean[l]));
  }
  return c;
}

}  // namespace testing_support

#endif  // TURBOSMOOTH_TESTS_SUPPORT_RANDOM_MODELS_HPP
