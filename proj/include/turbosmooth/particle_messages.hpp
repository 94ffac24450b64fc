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

#ifndef TURBOSMOOTH_PARTICLE_MESSAGES_HPP
#define TURBOSMOOTH_PARTICLE_MESSAGES_HPP

#include <vector>

#include "turbosmooth/clg_model.hpp"

namespace turbosmooth {

/// Model blocks evaluated at one nonlinear particle.
struct ParticleBlocks {
  Matrix a_linear;
  Matrix a_nonlinear;
  Matrix b;
  Vector f_linear;
  Vector f_nonlinear;
  Vector g;
};

ParticleBlocks evaluate_blocks(const ClgModel& model, const Vector& x_nonlinear);
std::vector<ParticleBlocks> evaluate_blocks(const ClgModel& model,
                                            const std::vector<Vector>& particles);

/// Pseudo-measurement of the linear block carried by the transition of a
/// particle to `target` (a nonlinear state one step later):
///   z = target - f_N,   W = A_N^T W_w^N A_N,   w = A_N^T W_w^N z.
/// Always carries the canonical form; moments only when W is invertible.
GaussianMessage linear_pseudo_measurement(const ParticleBlocks& blocks, const Vector& target,
                                          const Matrix& precision_nonlinear);

/// Inputs shared by the nonlinear pseudo-measurement weight.
struct LinearBeliefPair {
  const GaussianMessage* next;     // belief on the linear block one step later
  const GaussianMessage* current;  // belief on the linear block now
};

/// log of the particle weight obtained by integrating the linear-block
/// transition against the pair of beliefs:
///   N(eta_z - f_L; 0, clamp(C_z) + C_w^L)
/// with eta_z = eta_next - A_L eta_cur and C_z = C_next - A_L C_cur A_L^T.
double log_nonlinear_pseudo_weight(const ParticleBlocks& blocks, const LinearBeliefPair& beliefs,
                                   const Matrix& cov_linear, Diagnostics* diag = nullptr);

/// The same quantity assembled in information form:
///   Z = |eta_z|^2_{W_z} + |f_L|^2_{W_w} - |eta_pm|^2_{W_pm},
///   W_pm = W_z + W_w,  w_pm = W_z eta_z + W_w f_L,
/// returned as log((2 pi)^{-d/2} det(C_z + C_w)^{-1/2}) - Z / 2. Requires an
/// invertible clamped C_z.
double log_nonlinear_pseudo_weight_information(const ParticleBlocks& blocks,
                                               const LinearBeliefPair& beliefs,
                                               const Matrix& cov_linear,
                                               Diagnostics* diag = nullptr);

/// log N(target; A_N eta + f_N, A_N C A_N^T + C_w^N) for a linear-block
/// belief (eta, C).
double log_transition_weight(const ParticleBlocks& blocks, const Vector& target,
                             const GaussianMessage& linear, const Matrix& cov_nonlinear,
                             Diagnostics* diag = nullptr);

/// log N(y; B eta + g, B C B^T + C_e) for a linear-block belief (eta, C).
double log_measurement_weight(const ParticleBlocks& blocks, const Vector& y,
                              const GaussianMessage& linear, const Matrix& cov_measurement,
                              Diagnostics* diag = nullptr);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_PARTICLE_MESSAGES_HPP
