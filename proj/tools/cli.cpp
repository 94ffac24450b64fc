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

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/smoothers.hpp"
#include "turbosmooth/trajectory_io.hpp"

namespace turbosmooth::cli {

namespace {

using nlohmann::json;

Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) {
    throw ValidationError(std::string(what) + " must be an array of numbers");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ValidationError(std::string(what) + " must be an array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ValidationError(std::string(what) + " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

void apply_agent(const json& j, AgentMotionParams& p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "type") {
      continue;
    } else if (key == "rho") {
      p.rho = value.get<double>();
    } else if (key == "ts") {
      p.ts = value.get<double>();
    } else if (key == "sigma_p") {
      p.sigma_p = value.get<double>();
    } else if (key == "sigma_ev") {
      p.sigma_ev = value.get<double>();
    } else if (key == "sigma_ep") {
      p.sigma_ep = value.get<double>();
    } else if (key == "a0") {
      p.a0 = value.get<double>();
    } else if (key == "d0") {
      p.d0 = value.get<double>();
    } else if (key == "p0" || key == "v0") {
      const Vector v = to_vector(value, key.c_str());
      if (v.size() != 2) {
        throw ValidationError(key + " must have two entries");
      }
      (key == "p0" ? p.p0 : p.v0) = v;
    } else if (key == "v0_speed") {
      p.v0_speed = value.get<double>();
    } else {
      throw ValidationError("unknown agent model key '" + key + "'");
    }
  }
}

void apply_linear(const json& j, Config& c) {
  LinearClgParams p;
  auto mat = [&](const char* key, Matrix& out, bool required) {
    if (j.contains(key)) {
      out = to_matrix(j.at(key), key);
    } else if (required) {
      throw ValidationError(std::string("linear model needs '") + key + "'");
    }
  };
  auto vec = [&](const char* key, Vector& out, bool required) {
    if (j.contains(key)) {
      out = to_vector(j.at(key), key);
    } else if (required) {
      throw ValidationError(std::string("linear model needs '") + key + "'");
    }
  };
  static const char* const kKnown[] = {"type",          "a_linear",     "a_nonlinear",
                                       "b",             "f_linear",     "f_nonlinear",
                                       "g",             "f_linear_gain", "f_nonlinear_gain",
                                       "g_gain",        "cov_linear",   "cov_nonlinear",
                                       "cov_measurement", "prior_mean", "prior_cov",
                                       "initial_state"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ValidationError("unknown linear model key '" + key + "'");
    }
  }
  mat("a_linear", p.a_linear, true);
  mat("a_nonlinear", p.a_nonlinear, true);
  mat("b", p.b, true);
  vec("f_linear", p.f_linear, false);
  vec("f_nonlinear", p.f_nonlinear, false);
  vec("g", p.g, false);
  if (p.f_linear.size() == 0) {
    p.f_linear = Vector::Zero(p.a_linear.rows());
  }
  if (p.f_nonlinear.size() == 0) {
    p.f_nonlinear = Vector::Zero(p.a_nonlinear.rows());
  }
  if (p.g.size() == 0) {
    p.g = Vector::Zero(p.b.rows());
  }
  mat("f_linear_gain", p.f_linear_gain, false);
  mat("f_nonlinear_gain", p.f_nonlinear_gain, false);
  mat("g_gain", p.g_gain, false);
  mat("cov_linear", p.cov_linear, true);
  mat("cov_nonlinear", p.cov_nonlinear, true);
  mat("cov_measurement", p.cov_measurement, true);
  vec("prior_mean", p.prior_mean, true);
  mat("prior_cov", p.prior_cov, true);
  if (j.contains("initial_state")) {
    c.initial_state = to_vector(j.at("initial_state"), "initial_state");
  }
  c.linear = std::move(p);
}

TerminalInit parse_terminal(const std::string& s) {
  if (s == "forward") {
    return TerminalInit::forward_estimate;
  }
  if (s == "measurement") {
    return TerminalInit::measurement_only;
  }
  throw ValidationError("terminal must be 'forward' or 'measurement'");
}

FilterMode parse_forward(const std::string& s) {
  if (s == "turbo") {
    return FilterMode::turbo;
  }
  if (s == "mpf") {
    return FilterMode::mpf;
  }
  throw ValidationError("forward filter must be 'turbo' or 'mpf'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 1) {
      throw ValidationError("particle count '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) {
    throw ValidationError("empty particle count list");
  }
  return out;
}

/// Flag values; only options given on the command line override the
/// configuration file.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> np;
  std::optional<int> nit;
  std::optional<int> fwd_nit;
  std::optional<std::size_t> passes;
  std::optional<std::size_t> runs;
  std::optional<std::string> algo;
  std::optional<std::string> algos;
  std::optional<std::string> terminal;
  std::optional<std::string> forward;
  bool weight_reuse = false;
  bool no_exchange = false;
  bool sample_linear = false;
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> metrics;
  std::optional<std::string> json_output;
  std::optional<std::string> diagnostics;
  std::optional<std::string> dump_records;
};

Config resolve(const Flags& f, const std::string& command) {
  Config c;
  if (command == "filter") {
    c.algo = "mpf";
  } else if (command == "smooth") {
    c.algo = "stsa";
  }
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) {
      throw ValidationError("cannot open config file " + *f.config);
    }
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    apply_json(j, c);
  }
  if (f.horizon) c.horizon = *f.horizon;
  if (f.seed) c.seed = *f.seed;
  if (f.np) {
    c.particle_grid = parse_counts(*f.np);
    c.num_particles = c.particle_grid.front();
  }
  if (f.nit) c.iterations = *f.nit;
  if (f.fwd_nit) c.forward_iterations = *f.fwd_nit;
  if (f.passes) c.passes = *f.passes;
  if (f.runs) c.runs = *f.runs;
  if (f.algo) c.algo = *f.algo;
  if (f.algos) c.algos = split_list(*f.algos);
  if (f.terminal) c.terminal = parse_terminal(*f.terminal);
  if (f.forward) c.smoother_forward = parse_forward(*f.forward);
  if (f.weight_reuse) c.weight_reuse = true;
  if (f.no_exchange) c.exchange = false;
  if (f.sample_linear) c.sample_linear = true;
  if (f.input) c.input = *f.input;
  if (f.output) c.output = *f.output;
  if (f.metrics) c.metrics = *f.metrics;
  if (f.json_output) c.json_output = *f.json_output;
  if (f.diagnostics) c.diagnostics = *f.diagnostics;
  if (f.dump_records) c.dump_records = *f.dump_records;
  return c;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path);
  }
  return out;
}

void write_estimates(const std::string& path, const std::vector<Vector>& linear,
                     const std::vector<Vector>& nonlinear) {
  std::vector<Vector> states;
  states.reserve(linear.size());
  for (std::size_t l = 0; l < linear.size(); ++l) {
    Vector x(linear[l].size() + nonlinear[l].size());
    x << linear[l], nonlinear[l];
    states.push_back(std::move(x));
  }
  std::ofstream out = open_output(path);
  write_series_csv(out, {"x"}, {states});
}

json metrics_json(const Config& c, const std::string& alg, const SimulatedTrajectory& traj,
                  const ClgModel& model, const std::vector<Vector>& linear,
                  const std::vector<Vector>& nonlinear, double seconds) {
  json j = {{"alg", alg},
            {"N_p", c.num_particles},
            {"N_it", c.iterations},
            {"M", alg == "tsa" ? c.passes : 1},
            {"T", traj.horizon()},
            {"seed", c.seed},
            {"ctb_s", seconds}};
  if (traj.states.size() == traj.horizon()) {
    j["rmse_l"] = rmse(linear, head_blocks(traj.states, model.dim_linear));
    j["rmse_n"] = rmse(nonlinear, tail_blocks(traj.states, model.dim_nonlinear));
  } else {
    j["rmse_l"] = nullptr;
    j["rmse_n"] = nullptr;
  }
  return j;
}

std::string format_metric(const json& v) {
  if (v.is_null()) {
    return "n/a";
  }
  std::ostringstream os;
  os.precision(6);
  os << v.get<double>();
  return os.str();
}

SimulatedTrajectory load_input(const Config& c, const ClgModel& model) {
  if (c.input.empty()) {
    throw ValidationError("an input trajectory (-i) is required");
  }
  SimulatedTrajectory traj;
  try {
    traj = read_trajectory_csv(std::filesystem::path(c.input));
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  if (traj.horizon() == 0) {
    throw ValidationError("input trajectory has no rows");
  }
  if (traj.measurements.front().size() != model.dim_measurement) {
    throw ValidationError("input measurements do not match the model dimension");
  }
  if (!traj.states.empty() && traj.states.front().size() != model.dim()) {
    throw ValidationError("input states do not match the model dimension");
  }
  return traj;
}

int cmd_simulate(const Config& c, const ClgModel& model, std::ostream& out) {
  if (c.output.empty()) {
    throw ValidationError("simulate needs an output path (-o)");
  }
  SimulatedTrajectory traj;
  if (c.model_type == "agent") {
    traj = simulate(c.agent, c.horizon, c.seed);
  } else {
    const Vector x1 = c.initial_state ? *c.initial_state : c.linear->prior_mean;
    traj = simulate_clg(model, x1, c.horizon, c.seed);
  }
  write_trajectory_csv(std::filesystem::path(c.output), traj);
  out << "simulate model=" << c.model_type << " T=" << c.horizon << " seed=" << c.seed << " -> "
      << c.output << '\n';
  return 0;
}

ForwardPass forward_for(const Config& c, const ClgModel& model, const SimulatedTrajectory& traj,
                        FilterMode mode) {
  ForwardConfig fc;
  fc.num_particles = c.num_particles;
  fc.mode = mode;
  fc.exchange_iterations = c.forward_iterations;
  fc.seed = derive_seed(derive_seed(c.seed, {0}), {1});
  return run_forward(model, traj.measurements, fc);
}

void finish_run(const Config& c, const std::string& command, const json& metrics,
                const std::vector<Vector>& linear, const std::vector<Vector>& nonlinear,
                std::ostream& out) {
  if (!c.output.empty()) {
    write_estimates(c.output, linear, nonlinear);
  }
  if (!c.metrics.empty()) {
    std::ofstream m = open_output(c.metrics);
    m << metrics.dump(2) << '\n';
  }
  out << command << " alg=" << metrics["alg"].get<std::string>() << " T=" << metrics["T"]
      << " N_p=" << c.num_particles << " N_it=" << c.iterations
      << " rmse_l=" << format_metric(metrics["rmse_l"])
      << " rmse_n=" << format_metric(metrics["rmse_n"])
      << " ctb_s=" << format_metric(metrics["ctb_s"]) << '\n';
}

int cmd_filter(const Config& c, const ClgModel& model, std::ostream& out) {
  const SimulatedTrajectory traj = load_input(c, model);
  const FilterMode mode = c.algo == "tf" ? FilterMode::turbo : FilterMode::mpf;
  Stopwatch sw;
  const ForwardPass f = forward_for(c, model, traj, mode);
  const double seconds = sw.seconds();
  if (!c.dump_records.empty()) {
    dump_forward_records(c.dump_records, f.records);
  }
  const json m =
      metrics_json(c, c.algo, traj, model, f.filtered_linear, f.filtered_nonlinear, seconds);
  finish_run(c, "filter", m, f.filtered_linear, f.filtered_nonlinear, out);
  return 0;
}

int cmd_smooth(const Config& c, const ClgModel& model, std::ostream& out) {
  const SimulatedTrajectory traj = load_input(c, model);
  const std::uint64_t run_seed = derive_seed(c.seed, {0});
  Stopwatch sw;
  const ForwardPass f = forward_for(c, model, traj, c.smoother_forward);
  if (!c.dump_records.empty()) {
    dump_forward_records(c.dump_records, f.records);
  }
  std::vector<Vector> linear;
  std::vector<Vector> nonlinear;
  std::ofstream diag_out;
  if (!c.diagnostics.empty()) {
    diag_out = open_output(c.diagnostics);
  }
  if (c.algo == "stsa") {
    StsaConfig sc;
    sc.iterations = c.iterations;
    sc.weight_reuse = c.weight_reuse;
    sc.exchange = c.exchange;
    sc.terminal = c.terminal;
    sc.seed = derive_seed(run_seed, {2});
    MarginalSmoothedSet s = run_stsa(model, f.records, traj.measurements, sc);
    if (diag_out.is_open()) {
      write_diagnostics_jsonl(diag_out, s.pass.step_diagnostics);
    }
    linear = std::move(s.linear);
    nonlinear = std::move(s.nonlinear);
  } else {
    TsaConfig tc;
    tc.passes = c.passes;
    tc.iterations = c.iterations;
    tc.weight_reuse = c.weight_reuse;
    tc.exchange = c.exchange;
    tc.terminal = c.terminal;
    tc.sample_linear = c.sample_linear;
    tc.seed = derive_seed(run_seed, {3});
    TsaResult r = run_tsa(model, f.records, traj.measurements, tc);
    if (!r.failures.empty()) {
      throw Error("pass " + std::to_string(r.failures.front().pass) +
                  " failed: " + r.failures.front().message);
    }
    if (diag_out.is_open()) {
      for (std::size_t m = 0; m < r.trajectories.size(); ++m) {
        write_diagnostics_jsonl(diag_out, r.trajectories[m].diagnostics, m);
      }
    }
    PointEstimate p = trajectory_mean(r.trajectories);
    linear = std::move(p.linear);
    nonlinear = std::move(p.nonlinear);
  }
  const double seconds = sw.seconds();
  const json m = metrics_json(c, c.algo, traj, model, linear, nonlinear, seconds);
  finish_run(c, "smooth", m, linear, nonlinear, out);
  return 0;
}

int cmd_bench(const Config& c, std::ostream& out) {
  if (c.model_type != "agent") {
    throw ValidationError("bench runs on the agent model only");
  }
  BenchmarkConfig b;
  b.model = c.agent;
  b.algorithms.clear();
  for (const auto& a : c.algos) {
    b.algorithms.push_back(parse_algorithm(a));
  }
  b.particle_counts = c.particle_grid;
  b.runs = c.runs;
  b.horizon = c.horizon;
  b.iterations = c.iterations;
  b.forward_iterations = c.forward_iterations;
  b.passes = c.passes;
  b.weight_reuse = c.weight_reuse;
  b.exchange = c.exchange;
  b.sample_linear = c.sample_linear;
  b.smoother_forward = c.smoother_forward;
  b.terminal = c.terminal;
  b.seed = c.seed;
  const std::vector<RunMetrics> rows = benchmark(b);
  if (!c.output.empty()) {
    std::ofstream csv = open_output(c.output);
    write_metrics_csv(csv, rows);
  } else {
    write_metrics_csv(out, rows);
  }
  if (!c.json_output.empty()) {
    std::ofstream j = open_output(c.json_output);
    j << metrics_to_json(rows).dump(2) << '\n';
  }
  bool failed = false;
  for (const auto& r : rows) {
    out << "bench alg=" << to_string(r.algorithm) << " N_p=" << r.num_particles
        << " runs=" << r.runs;
    if (r.failed) {
      out << " FAILED: " << r.error << '\n';
      failed = true;
    } else {
      out << " rmse_l=" << r.rmse_l << " rmse_n=" << r.rmse_n << " ctb_s=" << r.ctb_s << '\n';
    }
  }
  return failed ? 2 : 0;
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON configuration file");
  app->add_option("--T", f.horizon, "number of steps")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("-o,--output", f.output, "output file");
}

void add_estimation(CLI::App* app, Flags& f) {
  app->add_option("-i,--input", f.input, "trajectory CSV (t, x.., y..)");
  app->add_option("--np", f.np, "number of particles");
  app->add_option("--fwd-nit", f.fwd_nit, "exchange iterations of the forward filter");
  app->add_option("--metrics", f.metrics, "metrics JSON output");
  app->add_option("--dump-records", f.dump_records, "directory for forward-record CSVs");
}

void add_smoothing(CLI::App* app, Flags& f) {
  app->add_option("--nit", f.nit, "backward iterations");
  app->add_option("--M", f.passes, "backward passes of the joint smoother");
  app->add_flag("--weight-reuse", f.weight_reuse, "reuse forward weights in every iteration");
  app->add_flag("--no-exchange", f.no_exchange, "disable pseudo-measurement exchange");
  app->add_flag("--sample-linear", f.sample_linear, "sample linear trajectories (tsa)");
  app->add_option("--terminal", f.terminal, "terminal backward init: forward|measurement");
  app->add_option("--forward", f.forward, "forward filter for smoothing: turbo|mpf");
}

}  // namespace

void apply_json(const json& j, Config& c) {
  if (!j.is_object()) {
    throw ValidationError("configuration must be a JSON object");
  }
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "model") {
        const std::string type = value.value("type", std::string("agent"));
        c.model_type = type;
        if (type == "agent") {
          apply_agent(value, c.agent);
        } else if (type == "linear") {
          apply_linear(value, c);
        } else {
          throw ValidationError("model type must be 'agent' or 'linear'");
        }
      } else if (key == "T") {
        c.horizon = value.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "np") {
        if (value.is_array()) {
          c.particle_grid = value.get<std::vector<std::size_t>>();
        } else {
          c.particle_grid = {value.get<std::size_t>()};
        }
        if (!c.particle_grid.empty()) {
          c.num_particles = c.particle_grid.front();
        }
      } else if (key == "nit") {
        c.iterations = value.get<int>();
      } else if (key == "fwd_nit") {
        c.forward_iterations = value.get<int>();
      } else if (key == "M") {
        c.passes = value.get<std::size_t>();
      } else if (key == "runs") {
        c.runs = value.get<std::size_t>();
      } else if (key == "algo") {
        c.algo = value.get<std::string>();
      } else if (key == "algos") {
        c.algos = value.get<std::vector<std::string>>();
      } else if (key == "weight_reuse") {
        c.weight_reuse = value.get<bool>();
      } else if (key == "exchange") {
        c.exchange = value.get<bool>();
      } else if (key == "sample_linear") {
        c.sample_linear = value.get<bool>();
      } else if (key == "terminal") {
        c.terminal = parse_terminal(value.get<std::string>());
      } else if (key == "forward") {
        c.smoother_forward = parse_forward(value.get<std::string>());
      } else {
        throw ValidationError("unknown configuration key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad configuration value: ") + e.what());
  }
}

void validate(const Config& c) {
  if (c.horizon < 1) {
    throw ValidationError("T must be at least 1");
  }
  if (c.particle_grid.empty() || c.num_particles < 1) {
    throw ValidationError("N_p must be at least 1");
  }
  if (c.iterations < 0 || c.forward_iterations < 0) {
    throw ValidationError("N_it must be non-negative");
  }
  if (c.passes < 1) {
    throw ValidationError("M must be at least 1");
  }
  if (c.runs < 1) {
    throw ValidationError("runs must be at least 1");
  }
  if (c.model_type == "agent") {
    if (!(c.agent.rho > 0.0 && c.agent.rho < 1.0)) {
      throw ValidationError("rho must lie in (0, 1)");
    }
  } else if (!c.linear) {
    throw ValidationError("linear model parameters are missing");
  }
  for (const auto& a : c.algos) {
    parse_algorithm(a);
  }
}

ClgModel build_model(const Config& c) {
  if (c.model_type == "agent") {
    return agent_clg_spec(c.agent);
  }
  return make_linear_clg(*c.linear);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turbo smoothing for conditionally linear Gaussian models"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* sim = app.add_subcommand("simulate", "simulate the model and write a trajectory CSV");
  CLI::App* filt = app.add_subcommand("filter", "run a forward filter (mpf | tf)");
  CLI::App* smooth = app.add_subcommand("smooth", "run a smoother (stsa | tsa)");
  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo benchmark on the agent model");
  for (CLI::App* a : {sim, filt, smooth, bench}) {
    add_common(a, flags);
  }
  add_estimation(filt, flags);
  add_estimation(smooth, flags);
  add_smoothing(smooth, flags);
  add_smoothing(bench, flags);
  filt->add_option("--algo", flags.algo, "mpf | tf");
  smooth->add_option("--algo", flags.algo, "stsa | tsa");
  smooth->add_option("--diagnostics", flags.diagnostics, "backward diagnostics (JSON lines)");
  bench->add_option("--np", flags.np, "comma-separated particle counts");
  bench->add_option("--runs", flags.runs, "Monte Carlo runs");
  bench->add_option("--algos", flags.algos, "comma-separated algorithms");
  bench->add_option("--fwd-nit", flags.fwd_nit, "exchange iterations of the forward filter");
  bench->add_option("--json", flags.json_output, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Config config;
  ClgModel model;
  try {
    config = resolve(flags, command);
    validate(config);
    if (command == "filter" && config.algo != "mpf" && config.algo != "tf") {
      throw ValidationError("filter --algo must be mpf or tf");
    }
    if (command == "smooth" && config.algo != "stsa" && config.algo != "tsa") {
      throw ValidationError("smooth --algo must be stsa or tsa");
    }
    model = build_model(config);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: invalid model: " << e.what() << '\n';
    return 1;
  }

  try {
    if (command == "simulate") {
      return cmd_simulate(config, model, out);
    }
    if (command == "filter") {
      return cmd_filter(config, model, out);
    }
    if (command == "smooth") {
      return cmd_smooth(config, model, out);
    }
    return cmd_bench(config, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace turbosmooth::cli
