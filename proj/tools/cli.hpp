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

#ifndef TURBOSMOOTH_TOOLS_CLI_HPP
#define TURBOSMOOTH_TOOLS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "turbosmooth/agent_motion.hpp"
#include "turbosmooth/evaluation.hpp"

namespace turbosmooth::cli {

/// Bad configuration or arguments (exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string model_type = "agent";  // agent | linear
  AgentMotionParams agent;
  std::optional<LinearClgParams> linear;
  std::optional<Vector> initial_state;  // linear model simulation start

  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  std::size_t num_particles = 100;
  int iterations = 1;
  int forward_iterations = 1;
  std::size_t passes = 10;
  std::size_t runs = 50;
  std::string algo;
  std::vector<std::string> algos{"mpf", "tf", "tsa", "stsa"};
  std::vector<std::size_t> particle_grid{100};
  bool weight_reuse = false;
  bool exchange = true;
  bool sample_linear = false;
  TerminalInit terminal = TerminalInit::forward_estimate;
  FilterMode smoother_forward = FilterMode::turbo;

  std::string input;
  std::string output;
  std::string metrics;
  std::string json_output;
  std::string diagnostics;
  std::string dump_records;
};

/// Fills `config` from a JSON object; unknown keys are rejected.
void apply_json(const nlohmann::json& j, Config& config);

/// Range checks. Throws ValidationError.
void validate(const Config& config);

/// The model selected by the configuration.
ClgModel build_model(const Config& config);

/// Entry point: returns 0 on success, 1 on validation errors, 2 on runtime
/// failures.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace turbosmooth::cli

#endif  // TURBOSMOOTH_TOOLS_CLI_HPP
