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

#ifndef TURBOSMOOTH_SMOOTHERS_HPP
#define TURBOSMOOTH_SMOOTHERS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "turbosmooth/backward.hpp"

namespace turbosmooth {

/// Product of a forward and a backward message.
GaussianMessage fuse_marginal(const GaussianMessage& forward, const GaussianMessage& backward,
                              Diagnostics* diag = nullptr);

struct SmoothedTrajectory {
  std::vector<Vector> nonlinear;
  std::vector<Vector> linear;
  std::vector<std::size_t> indices;  // chosen particle index per step
  std::uint64_t seed = 0;
  std::vector<StepDiagnostics> diagnostics;
};

struct TsaConfig {
  std::size_t passes = 10;
  int iterations = 1;
  bool weight_reuse = false;
  bool exchange = true;
  TerminalInit terminal = TerminalInit::forward_estimate;
  /// Draw the linear trajectory from the smoothed linear marginal instead
  /// of taking its mean.
  bool sample_linear = false;
  std::uint64_t seed = 0;
  /// Worker threads; 0 reads TURBOSMOOTH_THREADS (default 1).
  std::size_t threads = 0;
};

struct PassFailure {
  std::size_t pass = 0;
  std::string message;
};

struct TsaResult {
  std::vector<SmoothedTrajectory> trajectories;  // ordered by pass index
  std::vector<PassFailure> failures;
};

struct StsaConfig {
  int iterations = 1;
  bool weight_reuse = false;
  bool exchange = true;
  TerminalInit terminal = TerminalInit::forward_estimate;
  std::uint64_t seed = 0;
};

/// Per-step marginal smoothing output.
struct MarginalSmoothedSet {
  std::vector<GaussianMessage> smoothed;        // full state
  std::vector<GaussianMessage> smoothed_linear;  // leading block
  std::vector<std::vector<Vector>> particles;
  std::vector<std::vector<double>> weights;  // normalized
  std::vector<Vector> nonlinear;              // weighted particle mean
  std::vector<Vector> linear;                 // smoothed linear mean
  BackwardPass pass;
};

/// Seed of TSA pass `m`.
std::uint64_t pass_seed(std::uint64_t base, std::size_t m);

/// Thread count from TURBOSMOOTH_THREADS, at least 1.
std::size_t default_thread_count();

TsaResult run_tsa(const ClgModel& model, const std::vector<ForwardRecord>& records,
                  std::span<const Vector> measurements, const TsaConfig& config);

MarginalSmoothedSet run_stsa(const ClgModel& model, const std::vector<ForwardRecord>& records,
                             std::span<const Vector> measurements, const StsaConfig& config);

/// Mean over trajectories, per step, of the nonlinear and linear blocks.
struct PointEstimate {
  std::vector<Vector> nonlinear;
  std::vector<Vector> linear;
};
PointEstimate trajectory_mean(std::span<const SmoothedTrajectory> trajectories);

/// Empirical distribution of the chosen particle index at `step` (0-based).
std::vector<double> empirical_index_marginal(std::span<const SmoothedTrajectory> trajectories,
                                             std::size_t step, std::size_t num_particles);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_SMOOTHERS_HPP
