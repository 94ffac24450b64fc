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

#ifndef TURBOSMOOTH_FORWARD_HPP
#define TURBOSMOOTH_FORWARD_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "turbosmooth/clg_model.hpp"
#include "turbosmooth/random.hpp"

namespace turbosmooth {

/// Names of the per-particle weight vectors.
enum class WeightKind { fe, sm, bp, pm, be1, ms };

std::string_view to_string(WeightKind kind);

/// Particles for the nonlinear block with named log-domain weights.
struct ParticleCloud {
  std::vector<Vector> particles;
  std::map<WeightKind, std::vector<double>> log_weights;
  /// Index of each particle's parent in the previous cloud; empty at the
  /// first step.
  std::vector<std::size_t> ancestors;

  [[nodiscard]] std::size_t size() const noexcept { return particles.size(); }
  /// Throws std::out_of_range when the vector is absent.
  [[nodiscard]] const std::vector<double>& weights(WeightKind kind) const;
};

/// Everything the backward pass needs from one forward step.
struct ForwardRecord {
  std::size_t step = 0;  // 1-based
  GaussianMessage ekf_prediction;
  GaussianMessage ekf_estimate;  // measurement-updated EKF belief, both forms
  ParticleCloud cloud;           // carries normalized `fe` weights
  LinearizedModel linearization;
};

enum class FilterMode { turbo, mpf };

struct ForwardConfig {
  std::size_t num_particles = 100;
  FilterMode mode = FilterMode::turbo;
  int exchange_iterations = 1;
  std::uint64_t seed = 0;
};

struct ForwardPass {
  std::vector<ForwardRecord> records;
  std::vector<Vector> filtered_linear;
  std::vector<Vector> filtered_nonlinear;
  Diagnostics diagnostics;
};

/// EKF time update: mean through the full drift, covariance F C F^T + C_w.
GaussianMessage ekf_predict(const GaussianMessage& estimate, const ClgModel& model,
                            const LinearizedModel& lin, Diagnostics* diag = nullptr);

/// Canonical measurement message H W_e H^T, H W_e (y - v).
GaussianMessage measurement_message(const LinearizedModel& lin, const Vector& y,
                                    const Matrix& cov_measurement, Diagnostics* diag = nullptr);

/// EKF measurement update in information form; returns both forms when the
/// posterior precision is invertible.
GaussianMessage ekf_update(const GaussianMessage& prediction, const Vector& y,
                           const LinearizedModel& lin, const Matrix& cov_measurement,
                           Diagnostics* diag = nullptr);

/// Systematic resampling of `count` indices from normalized weights.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng);

/// Resamples by `resample_log_weights` and draws each child from the
/// marginalized transition N(A_N eta + f_N, A_N C A_N^T + C_w^N) with
/// (eta, C) the linear-block belief. Children carry uniform `fe` weights.
/// Unusable weights fall back to uniform resampling (counted in diag).
ParticleCloud pf_propagate(const ParticleCloud& cloud, std::span<const double> resample_log_weights,
                           const GaussianMessage& linear_belief, const ClgModel& model, Rng& rng,
                           Diagnostics* diag = nullptr);
/// Same, resampling by the cloud's `fe` weights.
ParticleCloud pf_propagate(const ParticleCloud& cloud, const GaussianMessage& linear_belief,
                           const ClgModel& model, Rng& rng, Diagnostics* diag = nullptr);

/// Adds log N(y; B eta + g, B C B^T + C_e) to the `fe` weights and
/// normalizes them. Throws AllWeightsZero.
void pf_weight_update(ParticleCloud& cloud, const Vector& y, const GaussianMessage& linear_belief,
                      const ClgModel& model, Diagnostics* diag = nullptr);

/// Runs the forward filter over all measurements.
ForwardPass run_forward(const ClgModel& model, std::span<const Vector> measurements,
                        const ForwardConfig& config);

/// Writes ekf_prediction.csv, ekf_estimate.csv, particles.csv and
/// linearization.csv into `dir`.
void dump_forward_records(const std::filesystem::path& dir,
                          const std::vector<ForwardRecord>& records);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_FORWARD_HPP
