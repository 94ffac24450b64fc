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

#ifndef TURBOSMOOTH_EVALUATION_HPP
#define TURBOSMOOTH_EVALUATION_HPP

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "turbosmooth/agent_motion.hpp"
#include "turbosmooth/backward.hpp"

namespace turbosmooth {

/// sqrt of the mean squared Euclidean error over the sequence.
/// Throws LengthMismatch.
double rmse(std::span<const Vector> estimates, std::span<const Vector> truth);

/// Mean squared Euclidean error over the sequence.
double mean_squared_error(std::span<const Vector> estimates, std::span<const Vector> truth);

enum class Algorithm { mpf, tf, tsa, stsa };

std::string_view to_string(Algorithm alg);
/// Throws std::invalid_argument on an unknown name.
Algorithm parse_algorithm(std::string_view name);

class Stopwatch {
 public:
  Stopwatch() : start_{std::chrono::steady_clock::now()} {}
  void reset() { start_ = std::chrono::steady_clock::now(); }
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Median of the means of up to `groups` contiguous groups of samples.
double median_of_means(std::span<const double> samples, std::size_t groups = 5);

struct BenchmarkConfig {
  AgentMotionParams model;
  std::vector<Algorithm> algorithms{Algorithm::mpf, Algorithm::tf, Algorithm::tsa,
                                    Algorithm::stsa};
  std::vector<std::size_t> particle_counts{100};
  std::size_t runs = 50;
  std::size_t horizon = 200;
  int iterations = 1;            // backward iterations
  int forward_iterations = 1;    // exchange iterations of the turbo forward filter
  std::size_t passes = 10;       // M for the joint smoother
  bool weight_reuse = false;
  bool exchange = true;
  bool sample_linear = false;
  /// Forward filter feeding the smoothers.
  FilterMode smoother_forward = FilterMode::turbo;
  TerminalInit terminal = TerminalInit::forward_estimate;
  std::uint64_t seed = 1;
  /// Worker threads over runs; 0 reads TURBOSMOOTH_THREADS.
  std::size_t threads = 0;
};

struct RunMetrics {
  Algorithm algorithm = Algorithm::mpf;
  std::size_t num_particles = 0;
  int iterations = 0;
  std::size_t passes = 0;
  std::size_t runs = 0;
  double rmse_l = 0.0;
  double rmse_n = 0.0;
  double ctb_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> run_mse_l;
  std::vector<double> run_mse_n;
  bool failed = false;
  std::string error;
};

/// Estimates of one algorithm on one trajectory.
struct Estimates {
  std::vector<Vector> linear;
  std::vector<Vector> nonlinear;
  double seconds = 0.0;
};

/// Runs every requested algorithm on one measurement sequence. The turbo
/// forward pass is shared by tf/tsa/stsa and its time is included in each.
std::vector<std::optional<Estimates>> run_algorithms(const ClgModel& model,
                                                     std::span<const Vector> measurements,
                                                     const BenchmarkConfig& config,
                                                     std::size_t num_particles,
                                                     std::uint64_t seed,
                                                     std::vector<std::string>* errors = nullptr);

/// Monte Carlo benchmark on the agent model: one metrics row per
/// (particle count, algorithm).
std::vector<RunMetrics> benchmark(const BenchmarkConfig& config);

/// Columns alg,N_p,N_it,M,runs,rmse_l,rmse_n,ctb_s.
void write_metrics_csv(std::ostream& out, std::span<const RunMetrics> rows);
nlohmann::json metrics_to_json(std::span<const RunMetrics> rows);

/// Splits a state sequence into its leading and trailing blocks.
std::vector<Vector> head_blocks(std::span<const Vector> states, Index n);
std::vector<Vector> tail_blocks(std::span<const Vector> states, Index n);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_EVALUATION_HPP
