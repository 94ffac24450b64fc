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


// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/formula_cases.hpp"
#include "support/quadrature_cases.hpp"
#include "support/random_models.hpp"
#include "turbosmooth/evaluation.hpp"

namespace {

using namespace turbosmooth;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Linear-Gaussian models: marginal smoother against RTS at T=50.
Verdict linear_oracle() {
  double mean_err = 0.0;
  double cov_err = 0.0;
  double worst_time = 0.0;
  const Index dims[][3] = {{2, 2, 4}, {1, 1, 2}, {2, 1, 3}, {1, 2, 3}, {3, 2, 5}};
  std::uint64_t seed = 100;
  for (const auto& d : dims) {
    std::mt19937_64 rng(seed);
    const auto params = testing_support::random_linear_params(rng, d[0], d[1], d[2]);
    const auto c = testing_support::compare_with_rts(params, 50, seed + 10);
    mean_err = std::max(mean_err, c.mean_error);
    cov_err = std::max(cov_err, c.cov_error);
    worst_time = std::max(worst_time, c.seconds);
    seed += 100;
  }
  return {mean_err < 1e-8 && cov_err < 1e-8 && worst_time < 1.0,
          fmt("mean rel err %.2e, cov rel err %.2e, slowest run %.3f s", mean_err, cov_err,
              worst_time)};
}

Verdict formula_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const double bp = testing_support::backward_predict_cases(1200, 1015);
  const double alt = testing_support::alternative_form_cases(1200, 1016);
  const double mm = testing_support::moment_match_cases(1200, 1017);
  const double secs = since(t0);
  return {bp < 1e-8 && alt < 1e-9 && mm < 1e-10 && secs < 10.0,
          fmt("backward_predict %.2e, alternative form %.2e, moment_match %.2e, %.2f s", bp,
              alt, mm, secs)};
}

Verdict quadrature_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int cases = 0;
  for (const auto& r : {testing_support::pseudo_weight_cases(1, 200, 2004),
                        testing_support::transition_weight_cases(1, 200, 2006),
                        testing_support::measurement_weight_cases(200, 2008)}) {
    worst = std::max({worst, r.worst_convolution, r.worst_information});
    cases += r.cases;
  }
  const double secs = since(t0);
  return {worst < 1e-6 && secs < 30.0,
          fmt("%.0f scalar cases, worst rel err %.2e, %.2f s", cases, worst, secs)};
}

BenchmarkConfig desk_config() {
  BenchmarkConfig c;
  c.particle_counts = {100};
  c.runs = 50;
  c.horizon = 200;
  c.iterations = 1;
  c.passes = 10;
  c.seed = 2026;
  c.threads = 1;
  return c;
}

const RunMetrics& row(const std::vector<RunMetrics>& rows, Algorithm a) {
  return *std::find_if(rows.begin(), rows.end(),
                       [a](const RunMetrics& r) { return r.algorithm == a; });
}

bool any_failed(const std::vector<RunMetrics>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const RunMetrics& r) { return r.failed; });
}

Verdict improvement(const std::vector<RunMetrics>& rows, double secs) {
  if (any_failed(rows)) return {false, "benchmark runs failed"};
  const auto& mpf = row(rows, Algorithm::mpf);
  const auto& stsa = row(rows, Algorithm::stsa);
  const double gl = 1.0 - stsa.rmse_l / mpf.rmse_l;
  const double gn = 1.0 - stsa.rmse_n / mpf.rmse_n;
  return {gl >= 0.15 && gn >= 0.15,
          fmt("reduction L %.1f%%, N %.1f%% vs mpf (benchmark %.0f s)", 100 * gl, 100 * gn,
              secs)};
}

Verdict tsa_close(const std::vector<RunMetrics>& rows) {
  if (any_failed(rows)) return {false, "benchmark runs failed"};
  const double n_tsa = row(rows, Algorithm::tsa).rmse_n;
  const double n_stsa = row(rows, Algorithm::stsa).rmse_n;
  const double rel = std::abs(n_tsa - n_stsa) / n_stsa;
  return {rel <= 0.10,
          fmt("rmse_n tsa %.5f, stsa %.5f, relative gap %.2f%%", n_tsa, n_stsa, 100 * rel)};
}

Verdict weight_reuse() {
  // Exact part: estimate outputs at one iteration, compared bit for bit.
  BenchmarkConfig c = desk_config();
  c.algorithms = {Algorithm::stsa, Algorithm::tsa};
  std::size_t values = 0;
  std::size_t differing = 0;
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const auto traj = simulate(c.model, c.horizon, 500 + r);
    const ClgModel model = agent_clg_spec(c.model);
    c.weight_reuse = false;
    const auto a = run_algorithms(model, traj.measurements, c, 100, 600 + r);
    c.weight_reuse = true;
    const auto b = run_algorithms(model, traj.measurements, c, 100, 600 + r);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k] || !b[k]) return {false, "smoother failed"};
      const auto compare = [&](const std::vector<Vector>& xs, const std::vector<Vector>& ys) {
        for (std::size_t l = 0; l < xs.size(); ++l) {
          for (Index i = 0; i < xs[l].size(); ++i) {
            ++values;
            const double x = xs[l][i];
            const double y = ys[l][i];
            if (x != y) {
              ++differing;
              worst = std::max(worst, std::abs(x - y) / std::max(1e-300, std::abs(x)));
            }
          }
        }
      };
      compare(a[k]->linear, b[k]->linear);
      compare(a[k]->nonlinear, b[k]->nonlinear);
    }
  }
  // Statistical part: RMSE change at two iterations.
  BenchmarkConfig c2 = desk_config();
  c2.algorithms = {Algorithm::stsa};
  c2.iterations = 2;
  c2.weight_reuse = false;
  const auto off = benchmark(c2);
  c2.weight_reuse = true;
  const auto on = benchmark(c2);
  if (any_failed(off) || any_failed(on)) return {false, "benchmark runs failed"};
  const double dl = std::abs(on[0].rmse_l - off[0].rmse_l) / off[0].rmse_l;
  const double dn = std::abs(on[0].rmse_n - off[0].rmse_n) / off[0].rmse_n;
  std::ostringstream os;
  os << "N_it=1: " << differing << " of " << values << " outputs differ (worst rel "
     << fmt("%.1e", worst) << "); N_it=2: rmse change L " << fmt("%.2f%%", 100 * dl) << ", N "
     << fmt("%.2f%%", 100 * dn);
  return {differing == 0 && dl <= 0.01 && dn <= 0.01, os.str()};
}

Verdict timing(const std::vector<RunMetrics>& rows) {
  if (any_failed(rows)) return {false, "benchmark runs failed"};
  const double s = row(rows, Algorithm::stsa).ctb_s;
  const double t = row(rows, Algorithm::tsa).ctb_s;
  return {s < t, fmt("ctb stsa %.4f s, tsa (M=10) %.4f s", s, t)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "turbosmooth_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string bin = TURBOSMOOTH_CLI_PATH;
  const std::vector<std::string> outputs{"traj.csv", "mpf.csv", "tf.csv", "stsa.csv", "tsa.csv"};
  for (int k = 0; k < 2; ++k) {
    const fs::path d = dir / std::to_string(k);
    fs::create_directories(d);
    const std::string t = (d / "traj.csv").string();
    const std::vector<std::string> cmds{
        bin + " simulate --T 200 --seed 11 -o " + t,
        bin + " filter --algo mpf --np 100 --seed 12 -i " + t + " -o " + (d / "mpf.csv").string(),
        bin + " filter --algo tf --np 100 --seed 12 -i " + t + " -o " + (d / "tf.csv").string(),
        bin + " smooth --algo stsa --np 100 --nit 2 --seed 12 -i " + t + " -o " +
            (d / "stsa.csv").string(),
        bin + " smooth --algo tsa --np 100 --M 10 --seed 12 -i " + t + " -o " +
            (d / "tsa.csv").string()};
    for (const auto& cmd : cmds) {
      if (std::system((cmd + " > /dev/null").c_str()) != 0) return {false, "command failed: " + cmd};
    }
  }
  std::size_t bytes = 0;
  for (const auto& name : outputs) {
    const std::string a = slurp(dir / "0" / name);
    if (a.empty() || a != slurp(dir / "1" / name)) {
      return {false, name + " differs between runs"};
    }
    bytes += a.size();
  }
  fs::remove_all(dir);
  return {true, std::to_string(outputs.size()) + " output files identical (" +
                    std::to_string(bytes) + " bytes)"};
}

Verdict guarded(const std::function<Verdict()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };

  report(1, "linear-Gaussian oracle", guarded(linear_oracle));
  report(2, "formula equivalence", guarded(formula_suite));
  report(3, "quadrature oracles", guarded(quadrature_suite));

  std::vector<RunMetrics> rows;
  double bench_secs = 0.0;
  const Verdict bench = guarded([&] {
    BenchmarkConfig c = desk_config();
    c.algorithms = {Algorithm::mpf, Algorithm::tsa, Algorithm::stsa};
    const auto t0 = std::chrono::steady_clock::now();
    rows = benchmark(c);
    bench_secs = since(t0);
    return Verdict{true, ""};
  });
  if (!bench.pass) {
    report(4, "agent model improvement over mpf", bench);
    report(5, "tsa close to stsa", bench);
  } else {
    report(4, "agent model improvement over mpf", improvement(rows, bench_secs));
    report(5, "tsa close to stsa", tsa_close(rows));
  }
  report(6, "weight-reuse neutrality", guarded(weight_reuse));
  report(7, "stsa faster than tsa", bench.pass ? timing(rows) : bench);
  report(8, "determinism", guarded(determinism));
  return failures == 0 ? 0 : 1;
}
