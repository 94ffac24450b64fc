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

#include "turbosmooth/smoothers.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <random>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/parallel.hpp"

namespace turbosmooth {

GaussianMessage fuse_marginal(const GaussianMessage& forward, const GaussianMessage& backward,
                              Diagnostics* diag) {
  return product(forward, backward, diag);
}

std::uint64_t pass_seed(std::uint64_t base, std::size_t m) { return derive_seed(base, {m}); }

std::size_t default_thread_count() {
  if (const char* env = std::getenv("TURBOSMOOTH_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) {
      return static_cast<std::size_t>(n);
    }
  }
  return 1;
}

namespace {

SmoothedTrajectory trajectory_from_pass(const BackwardPass& pass, bool sample_linear,
                                        std::uint64_t seed, Index dim_linear) {
  SmoothedTrajectory t;
  t.seed = seed;
  Rng rng(derive_seed(seed, {0x6c696eULL}));
  std::normal_distribution<double> normal;
  for (std::size_t l = 0; l < pass.states.size(); ++l) {
    t.nonlinear.push_back(pass.states[l].be_particle);
    t.indices.push_back(pass.states[l].chosen_index);
    const GaussianMessage lin =
        marginalize(pass.smoothed[l], IndexRange::leading(dim_linear));
    if (sample_linear) {
      Eigen::LLT<Matrix> llt(lin.cov());
      Vector n(dim_linear);
      for (Index i = 0; i < dim_linear; ++i) {
        n[i] = normal(rng);
      }
      t.linear.push_back(lin.mean() + Matrix(llt.matrixL()) * n);
    } else {
      t.linear.push_back(lin.mean());
    }
  }
  return t;
}

}  // namespace

TsaResult run_tsa(const ClgModel& model, const std::vector<ForwardRecord>& records,
                  std::span<const Vector> measurements, const TsaConfig& config) {
  if (config.passes == 0) {
    throw DimensionMismatch("at least one pass is required");
  }
  const auto blocks = record_blocks(model, records);
  std::vector<std::optional<SmoothedTrajectory>> slots(config.passes);
  std::vector<std::string> errors(config.passes);

  auto run_pass = [&](std::size_t m) {
    BackwardConfig bc;
    bc.iterations = config.iterations;
    bc.mode = SmootherMode::joint;
    bc.weight_reuse = config.weight_reuse;
    bc.exchange = config.exchange;
    bc.terminal = config.terminal;
    bc.seed = pass_seed(config.seed, m);
    try {
      const BackwardPass pass = run_backward(model, records, measurements, bc, &blocks);
      slots[m] = trajectory_from_pass(pass, config.sample_linear, bc.seed, model.dim_linear);
      slots[m]->diagnostics = pass.step_diagnostics;
    } catch (const std::exception& e) {
      errors[m] = e.what();
    }
  };

  parallel_for(config.passes, config.threads == 0 ? default_thread_count() : config.threads,
               run_pass);

  TsaResult result;
  for (std::size_t m = 0; m < config.passes; ++m) {
    if (slots[m]) {
      result.trajectories.push_back(std::move(*slots[m]));
    } else {
      result.failures.push_back({m, errors[m]});
    }
  }
  return result;
}

MarginalSmoothedSet run_stsa(const ClgModel& model, const std::vector<ForwardRecord>& records,
                             std::span<const Vector> measurements, const StsaConfig& config) {
  BackwardConfig bc;
  bc.iterations = config.iterations;
  bc.mode = SmootherMode::marginal;
  bc.weight_reuse = config.weight_reuse;
  bc.exchange = config.exchange;
  bc.terminal = config.terminal;
  bc.seed = config.seed;

  MarginalSmoothedSet out{{}, {}, {}, {}, {}, {}, run_backward(model, records, measurements, bc)};
  const IndexRange lead = IndexRange::leading(model.dim_linear);
  for (std::size_t l = 0; l < records.size(); ++l) {
    const GaussianMessage& sm = out.pass.smoothed[l];
    out.smoothed.push_back(sm);
    out.smoothed_linear.push_back(marginalize(sm, lead));
    out.particles.push_back(records[l].cloud.particles);
    out.weights.push_back(out.pass.smoothed_weights[l]);
    out.nonlinear.push_back(out.pass.states[l].be_particle);
    out.linear.push_back(out.smoothed_linear.back().mean());
  }
  return out;
}

PointEstimate trajectory_mean(std::span<const SmoothedTrajectory> trajectories) {
  PointEstimate p;
  if (trajectories.empty()) {
    return p;
  }
  const std::size_t horizon = trajectories.front().nonlinear.size();
  const double inv = 1.0 / static_cast<double>(trajectories.size());
  for (std::size_t l = 0; l < horizon; ++l) {
    Vector n = Vector::Zero(trajectories.front().nonlinear[l].size());
    Vector x = Vector::Zero(trajectories.front().linear[l].size());
    for (const auto& t : trajectories) {
      n += t.nonlinear[l];
      x += t.linear[l];
    }
    p.nonlinear.push_back(inv * n);
    p.linear.push_back(inv * x);
  }
  return p;
}

std::vector<double> empirical_index_marginal(std::span<const SmoothedTrajectory> trajectories,
                                             std::size_t step, std::size_t num_particles) {
  std::vector<double> p(num_particles, 0.0);
  if (trajectories.empty()) {
    return p;
  }
  for (const auto& t : trajectories) {
    const std::size_t j = t.indices.at(step);
    if (j < num_particles) {
      p[j] += 1.0;
    }
  }
  for (double& v : p) {
    v /= static_cast<double>(trajectories.size());
  }
  return p;
}

}  // namespace turbosmooth
