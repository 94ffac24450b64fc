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

#ifndef TURBOSMOOTH_BACKWARD_HPP
#define TURBOSMOOTH_BACKWARD_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "turbosmooth/forward.hpp"
#include "turbosmooth/particle_messages.hpp"

namespace turbosmooth {

/// joint: the nonlinear backward particle is drawn from the smoothed
/// weights (one trajectory realization per pass). marginal: it is the
/// weighted mean.
enum class SmootherMode { joint, marginal };

/// How the backward Gaussian is seeded at the last step.
/// forward_estimate copies the forward EKF estimate; measurement_only uses
/// the last measurement message alone.
enum class TerminalInit { forward_estimate, measurement_only };

struct BackwardConfig {
  int iterations = 1;
  SmootherMode mode = SmootherMode::marginal;
  bool weight_reuse = false;
  /// Pseudo-measurement exchange between the Gaussian and particle branches.
  bool exchange = true;
  TerminalInit terminal = TerminalInit::forward_estimate;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct BackwardState {
  std::size_t step = 0;
  GaussianMessage be_gauss;
  Vector be_particle;
  std::size_t chosen_index = kNoIndex;
};

/// Per-particle pseudo-measurements of the linear block.
struct PseudoMeasurementL {
  std::vector<Vector> z;
  std::vector<GaussianMessage> pm_gauss;
};

struct Phase1Result {
  GaussianMessage bp;
  /// Linear-block marginal of the next backward Gaussian; absent when that
  /// Gaussian has no moment form.
  std::optional<GaussianMessage> be_linear_next;
  PseudoMeasurementL pm;
};

/// Per-iteration particle weights (log domain) and Gaussian messages.
struct IterationScratch {
  int k = 0;
  std::vector<double> log_w_sm;
  std::vector<double> w_sm;  // normalized, linear domain
  std::vector<double> log_w_pm;
  std::vector<double> log_w_bp;
  std::vector<double> log_w_be1;
  std::vector<double> log_w_fe1;
  std::optional<GaussianMessage> m_pm;
  std::optional<GaussianMessage> m_be1;
  std::optional<GaussianMessage> m_sm;
  std::optional<GaussianMessage> m_sm_linear;
};

/// Read-only per-step inputs.
struct StepInputs {
  const ClgModel& model;
  const ForwardRecord& record;
  const std::vector<ParticleBlocks>& blocks;
  const Vector& y;
};

struct StepDiagnostics {
  std::size_t step = 0;
  Diagnostics counters;
  bool degenerate = false;
  double ess = 0.0;
};

struct BackwardPass {
  std::vector<BackwardState> states;                // index l - 1
  std::vector<std::vector<double>> smoothed_weights;  // W_sm after the last iteration
  std::vector<GaussianMessage> smoothed;            // full-state smoothed Gaussian
  std::vector<GaussianMessage> backward_estimates;  // be1 after the last iteration
  std::vector<StepDiagnostics> step_diagnostics;
  Diagnostics diagnostics;
};

BackwardState init_terminal(const StepInputs& in, const BackwardConfig& config, Rng& rng,
                            Diagnostics* diag = nullptr);

Phase1Result phase1(const BackwardState& next, const StepInputs& in, Diagnostics* diag = nullptr);

/// Smoothed particle weights from the previous iteration and the
/// moment-matched pseudo-measurement over the full state. Returns false when
/// the weights degenerated and the forward weights were used instead.
bool phase2_step1(const Phase1Result& p1, const StepInputs& in, const IterationScratch& prev,
                  bool exchange, IterationScratch& out, Diagnostics* diag = nullptr);

void phase2_step2(const Phase1Result& p1, const StepInputs& in, IterationScratch& it,
                  Diagnostics* diag = nullptr);

void phase2_step3(const Phase1Result& p1, const StepInputs& in, bool exchange,
                  IterationScratch& it, Diagnostics* diag = nullptr);

void phase2_step4(const BackwardState& next, const StepInputs& in, IterationScratch& it,
                  Diagnostics* diag = nullptr);

void phase2_step5(const StepInputs& in, IterationScratch& it, Diagnostics* diag = nullptr);

struct Phase3Result {
  BackwardState state;
  std::vector<double> w_sm;
  GaussianMessage m_sm;
  GaussianMessage m_be1;
  bool degenerate = false;
};

Phase3Result phase3(const IterationScratch& last, const Phase1Result& p1, const StepInputs& in,
                    const BackwardConfig& config, Rng& rng, Diagnostics* diag = nullptr);

/// Categorical draw with the lowest index winning ties.
std::size_t sample_index(std::span<const double> weights, Rng& rng);

/// Forward weights of a record, normalized to the linear domain.
std::vector<double> forward_weights(const ForwardRecord& record);

/// One backward pass over all records. `blocks` may hold precomputed
/// per-particle model blocks (one vector per record).
BackwardPass run_backward(const ClgModel& model, const std::vector<ForwardRecord>& records,
                          std::span<const Vector> measurements, const BackwardConfig& config,
                          const std::vector<std::vector<ParticleBlocks>>* blocks = nullptr);

std::vector<std::vector<ParticleBlocks>> record_blocks(const ClgModel& model,
                                                       const std::vector<ForwardRecord>& records);

/// One JSON object per line: step, psd_clamps, jitter, degenerate_weights,
/// degenerate, ess, plus `pass` when given.
void write_diagnostics_jsonl(std::ostream& out, std::span<const StepDiagnostics> steps,
                             std::optional<std::size_t> pass = std::nullopt);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_BACKWARD_HPP
