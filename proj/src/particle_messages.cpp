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

#include "turbosmooth/particle_messages.hpp"

#include <cmath>
#include <numbers>

#include "turbosmooth/errors.hpp"

namespace turbosmooth {

namespace {

struct ZMessage {
  Vector mean;
  Matrix cov;
};

ZMessage z_message(const ParticleBlocks& blocks, const LinearBeliefPair& beliefs,
                   Diagnostics* diag) {
  const GaussianMessage& next = *beliefs.next;
  const GaussianMessage& cur = *beliefs.current;
  ZMessage z;
  z.mean = next.mean() - blocks.a_linear * cur.mean();
  z.cov = clamp_psd(next.cov() - blocks.a_linear * cur.cov() * blocks.a_linear.transpose(), diag)
              .matrix;
  return z;
}

}  // namespace

ParticleBlocks evaluate_blocks(const ClgModel& model, const Vector& x_nonlinear) {
  return {model.a_linear(x_nonlinear), model.a_nonlinear(x_nonlinear), model.b(x_nonlinear),
          model.f_linear(x_nonlinear), model.f_nonlinear(x_nonlinear), model.g(x_nonlinear)};
}

std::vector<ParticleBlocks> evaluate_blocks(const ClgModel& model,
                                            const std::vector<Vector>& particles) {
  std::vector<ParticleBlocks> out;
  out.reserve(particles.size());
  for (const auto& p : particles) {
    out.push_back(evaluate_blocks(model, p));
  }
  return out;
}

GaussianMessage linear_pseudo_measurement(const ParticleBlocks& blocks, const Vector& target,
                                          const Matrix& precision_nonlinear) {
  const Vector z = target - blocks.f_nonlinear;
  const Matrix at_w = blocks.a_nonlinear.transpose() * precision_nonlinear;
  Matrix w_mat = at_w * blocks.a_nonlinear;
  w_mat = 0.5 * (w_mat + w_mat.transpose());
  Vector w_vec = at_w * z;
  if (w_mat.isZero(0.0)) {
    return GaussianMessage::from_canonical(std::move(w_mat), std::move(w_vec));
  }
  Eigen::LLT<Matrix> llt(w_mat);
  if (llt.info() != Eigen::Success) {
    return GaussianMessage::from_canonical(std::move(w_mat), std::move(w_vec));
  }
  Vector mean = llt.solve(w_vec);
  Matrix cov = llt.solve(Matrix::Identity(w_mat.rows(), w_mat.cols()));
  return GaussianMessage::from_both(std::move(mean), std::move(cov), std::move(w_mat),
                                    std::move(w_vec));
}

double log_nonlinear_pseudo_weight(const ParticleBlocks& blocks, const LinearBeliefPair& beliefs,
                                   const Matrix& cov_linear, Diagnostics* diag) {
  const ZMessage z = z_message(blocks, beliefs, diag);
  return log_gaussian_eval(z.mean - blocks.f_linear, Vector::Zero(z.mean.size()),
                           z.cov + cov_linear, diag);
}

double log_nonlinear_pseudo_weight_information(const ParticleBlocks& blocks,
                                               const LinearBeliefPair& beliefs,
                                               const Matrix& cov_linear, Diagnostics* diag) {
  const ZMessage z = z_message(blocks, beliefs, diag);
  const auto w_z = spd_inverse(z.cov, diag);
  const auto w_w = spd_inverse(cov_linear, diag);
  if (!w_z || !w_w) {
    throw DegenerateCovariance("pseudo-measurement covariance is singular");
  }
  const Matrix w_pm = *w_z + *w_w;
  const Vector info_pm = *w_z * z.mean + *w_w * blocks.f_linear;
  const auto c_pm = spd_inverse(w_pm, diag);
  if (!c_pm) {
    throw DegenerateCovariance("pseudo-measurement precision is singular");
  }
  const Vector eta_pm = *c_pm * info_pm;
  const double big_z = z.mean.dot(*w_z * z.mean) + blocks.f_linear.dot(*w_w * blocks.f_linear) -
                       eta_pm.dot(w_pm * eta_pm);
  const Matrix c_total = z.cov + cov_linear;
  const auto llt = spd_factor(c_total, diag);
  if (!llt) {
    throw DegenerateCovariance("pseudo-measurement covariance is singular");
  }
  const Matrix l = llt->matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double d = static_cast<double>(c_total.rows());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * big_z;
}

double log_transition_weight(const ParticleBlocks& blocks, const Vector& target,
                             const GaussianMessage& linear, const Matrix& cov_nonlinear,
                             Diagnostics* diag) {
  const Vector mean = blocks.a_nonlinear * linear.mean() + blocks.f_nonlinear;
  const Matrix cov =
      blocks.a_nonlinear * linear.cov() * blocks.a_nonlinear.transpose() + cov_nonlinear;
  return log_gaussian_eval(target, mean, cov, diag);
}

double log_measurement_weight(const ParticleBlocks& blocks, const Vector& y,
                              const GaussianMessage& linear, const Matrix& cov_measurement,
                              Diagnostics* diag) {
  const Vector mean = blocks.b * linear.mean() + blocks.g;
  const Matrix cov = blocks.b * linear.cov() * blocks.b.transpose() + cov_measurement;
  return log_gaussian_eval(y, mean, cov, diag);
}

}  // namespace turbosmooth
