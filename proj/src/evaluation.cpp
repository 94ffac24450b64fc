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

#include "turbosmooth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/parallel.hpp"
#include "turbosmooth/smoothers.hpp"
#include "turbosmooth/trajectory_io.hpp"

namespace turbosmooth {

double mean_squared_error(std::span<const Vector> estimates, std::span<const Vector> truth) {
  if (estimates.size() != truth.size()) {
    throw LengthMismatch("estimate and truth sequences differ in length (" +
                         std::to_string(estimates.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  }
  if (estimates.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < estimates.size(); ++l) {
    if (estimates[l].size() != truth[l].size()) {
      throw DimensionMismatch("estimate and truth vectors differ in size");
    }
    sum += (estimates[l] - truth[l]).squaredNorm();
  }
  return sum / static_cast<double>(estimates.size());
}

double rmse(std::span<const Vector> estimates, std::span<const Vector> truth) {
  return std::sqrt(mean_squared_error(estimates, truth));
}

std::string_view to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::mpf:
      return "mpf";
    case Algorithm::tf:
      return "tf";
    case Algorithm::tsa:
      return "tsa";
    case Algorithm::stsa:
      return "stsa";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::mpf, Algorithm::tf, Algorithm::tsa, Algorithm::stsa}) {
    if (name == to_string(a)) {
      return a;
    }
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

double median_of_means(std::span<const double> samples, std::size_t groups) {
  if (samples.empty()) {
    return 0.0;
  }
  groups = std::clamp<std::size_t>(groups, 1, samples.size());
  std::vector<double> means;
  means.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t begin = g * samples.size() / groups;
    const std::size_t end = (g + 1) * samples.size() / groups;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      s += samples[i];
    }
    means.push_back(s / static_cast<double>(end - begin));
  }
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  return means.size() % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

std::vector<Vector> head_blocks(std::span<const Vector> states, Index n) {
  std::vector<Vector> out;
  out.reserve(states.size());
  for (const auto& x : states) {
    out.push_back(x.head(n));
  }
  return out;
}

std::vector<Vector> tail_blocks(std::span<const Vector> states, Index n) {
  std::vector<Vector> out;
  out.reserve(states.size());
  for (const auto& x : states) {
    out.push_back(x.tail(n));
  }
  return out;
}

std::vector<std::optional<Estimates>> run_algorithms(const ClgModel& model,
                                                     std::span<const Vector> measurements,
                                                     const BenchmarkConfig& config,
                                                     std::size_t num_particles,
                                                     std::uint64_t seed,
                                                     std::vector<std::string>* errors) {
  const std::size_t n = config.algorithms.size();
  std::vector<std::optional<Estimates>> out(n);
  if (errors != nullptr) {
    errors->assign(n, std::string());
  }
  auto fail = [&](std::size_t i, const std::exception& e) {
    if (errors != nullptr) {
      (*errors)[i] = e.what();
    }
  };

  ForwardConfig fc;
  fc.num_particles = num_particles;
  fc.exchange_iterations = config.forward_iterations;
  fc.seed = derive_seed(seed, {1});

  // Forward passes are run lazily and shared between algorithms.
  std::optional<ForwardPass> fwd[2];
  double fwd_seconds[2] = {0.0, 0.0};
  std::string fwd_error[2];
  auto forward = [&](FilterMode mode) -> const ForwardPass& {
    const int k = mode == FilterMode::turbo ? 0 : 1;
    if (!fwd[k] && fwd_error[k].empty()) {
      ForwardConfig c = fc;
      c.mode = mode;
      Stopwatch sw;
      try {
        fwd[k] = run_forward(model, measurements, c);
      } catch (const std::exception& e) {
        fwd_error[k] = e.what();
      }
      fwd_seconds[k] = sw.seconds();
    }
    if (!fwd[k]) {
      throw Error(fwd_error[k]);
    }
    return *fwd[k];
  };

  for (std::size_t i = 0; i < n; ++i) {
    try {
      Estimates e;
      switch (config.algorithms[i]) {
        case Algorithm::mpf:
        case Algorithm::tf: {
          const FilterMode mode =
              config.algorithms[i] == Algorithm::mpf ? FilterMode::mpf : FilterMode::turbo;
          const ForwardPass& f = forward(mode);
          e.linear = f.filtered_linear;
          e.nonlinear = f.filtered_nonlinear;
          e.seconds = fwd_seconds[mode == FilterMode::turbo ? 0 : 1];
          break;
        }
        case Algorithm::stsa: {
          const ForwardPass& f = forward(config.smoother_forward);
          StsaConfig sc;
          sc.iterations = config.iterations;
          sc.weight_reuse = config.weight_reuse;
          sc.exchange = config.exchange;
          sc.terminal = config.terminal;
          sc.seed = derive_seed(seed, {2});
          Stopwatch sw;
          MarginalSmoothedSet s = run_stsa(model, f.records, measurements, sc);
          e.seconds = sw.seconds() + fwd_seconds[config.smoother_forward == FilterMode::turbo ? 0 : 1];
          e.linear = std::move(s.linear);
          e.nonlinear = std::move(s.nonlinear);
          break;
        }
        case Algorithm::tsa: {
          const ForwardPass& f = forward(config.smoother_forward);
          TsaConfig tc;
          tc.passes = config.passes;
          tc.iterations = config.iterations;
          tc.weight_reuse = config.weight_reuse;
          tc.exchange = config.exchange;
          tc.terminal = config.terminal;
          tc.sample_linear = config.sample_linear;
          tc.seed = derive_seed(seed, {3});
          tc.threads = 1;
          Stopwatch sw;
          TsaResult r = run_tsa(model, f.records, measurements, tc);
          const double elapsed = sw.seconds();
          if (!r.failures.empty()) {
            throw Error("pass " + std::to_string(r.failures.front().pass) +
                        " failed: " + r.failures.front().message);
          }
          PointEstimate p = trajectory_mean(r.trajectories);
          e.seconds = elapsed + fwd_seconds[config.smoother_forward == FilterMode::turbo ? 0 : 1];
          e.linear = std::move(p.linear);
          e.nonlinear = std::move(p.nonlinear);
          break;
        }
      }
      out[i] = std::move(e);
    } catch (const std::exception& ex) {
      fail(i, ex);
    }
  }
  return out;
}

std::vector<RunMetrics> benchmark(const BenchmarkConfig& config) {
  config.model.validate();
  if (config.runs == 0 || config.horizon == 0) {
    throw DimensionMismatch("runs and horizon must be positive");
  }
  const ClgModel model = agent_clg_spec(config.model);
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_np = config.particle_counts.size();
  const std::size_t cells = n_np * config.runs;

  struct Cell {
    std::vector<std::optional<Estimates>> estimates;
    std::vector<std::string> errors;
    std::vector<Vector> truth_l;
    std::vector<Vector> truth_n;
  };
  std::vector<Cell> results(cells);

  parallel_for(cells, config.threads == 0 ? default_thread_count() : config.threads,
               [&](std::size_t c) {
                 const std::size_t p = c / config.runs;
                 const std::size_t r = c % config.runs;
                 const std::uint64_t run_seed = derive_seed(config.seed, {r});
                 Cell& cell = results[c];
                 try {
                   const SimulatedTrajectory traj =
                       simulate(config.model, config.horizon, derive_seed(run_seed, {0}));
                   cell.truth_l = head_blocks(traj.states, model.dim_linear);
                   cell.truth_n = tail_blocks(traj.states, model.dim_nonlinear);
                   cell.estimates =
                       run_algorithms(model, traj.measurements, config, config.particle_counts[p],
                                      derive_seed(run_seed, {1, config.particle_counts[p]}),
                                      &cell.errors);
                 } catch (const std::exception& e) {
                   cell.estimates.assign(n_alg, std::nullopt);
                   cell.errors.assign(n_alg, e.what());
                 }
               });

  std::vector<RunMetrics> rows;
  for (std::size_t p = 0; p < n_np; ++p) {
    for (std::size_t a = 0; a < n_alg; ++a) {
      RunMetrics m;
      m.algorithm = config.algorithms[a];
      m.num_particles = config.particle_counts[p];
      m.iterations = config.iterations;
      m.passes = config.algorithms[a] == Algorithm::tsa ? config.passes : 1;
      m.runs = config.runs;
      m.seed = config.seed;
      std::vector<double> times;
      for (std::size_t r = 0; r < config.runs; ++r) {
        const Cell& cell = results[p * config.runs + r];
        const auto& est = cell.estimates[a];
        if (!est) {
          m.failed = true;
          if (m.error.empty()) {
            m.error = "run " + std::to_string(r) + ": " + cell.errors[a];
          }
          continue;
        }
        m.run_mse_l.push_back(mean_squared_error(est->linear, cell.truth_l));
        m.run_mse_n.push_back(mean_squared_error(est->nonlinear, cell.truth_n));
        times.push_back(est->seconds);
      }
      if (!m.run_mse_l.empty()) {
        double sl = 0.0;
        double sn = 0.0;
        for (std::size_t i = 0; i < m.run_mse_l.size(); ++i) {
          sl += m.run_mse_l[i];
          sn += m.run_mse_n[i];
        }
        m.rmse_l = std::sqrt(sl / static_cast<double>(m.run_mse_l.size()));
        m.rmse_n = std::sqrt(sn / static_cast<double>(m.run_mse_n.size()));
        m.ctb_s = median_of_means(times);
      }
      rows.push_back(std::move(m));
    }
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const RunMetrics> rows) {
  out << "alg,N_p,N_it,M,runs,rmse_l,rmse_n,ctb_s\n";
  for (const auto& r : rows) {
    out << to_string(r.algorithm) << ',' << r.num_particles << ',' << r.iterations << ','
        << r.passes << ',' << r.runs << ',';
    if (r.failed) {
      out << "nan,nan,nan\n";
      continue;
    }
    out << format_double(r.rmse_l) << ',' << format_double(r.rmse_n) << ','
        << format_double(r.ctb_s) << '\n';
  }
}

nlohmann::json metrics_to_json(std::span<const RunMetrics> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"alg", to_string(r.algorithm)},
                        {"N_p", r.num_particles},
                        {"N_it", r.iterations},
                        {"M", r.passes},
                        {"runs", r.runs},
                        {"seed", r.seed},
                        {"failed", r.failed}};
    if (r.failed) {
      j["error"] = r.error;
    } else {
      j["rmse_l"] = r.rmse_l;
      j["rmse_n"] = r.rmse_n;
      j["ctb_s"] = r.ctb_s;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace turbosmooth
