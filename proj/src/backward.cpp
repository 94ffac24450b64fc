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

#include "turbosmooth/backward.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "turbosmooth/errors.hpp"

namespace turbosmooth {

namespace {

Vector weighted_mean(const std::vector<Vector>& points, std::span<const double> weights) {
  Vector m = Vector::Zero(points.front().size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    m += weights[j] * points[j];
  }
  return m;
}

/// Normalized smoothed weights from the sum of two log-weight vectors, or
/// the forward weights when the sum underflows everywhere.
std::vector<double> smoothed_weights(const std::vector<double>& a, const std::vector<double>& b,
                                     const ForwardRecord& record, std::vector<double>& log_sum,
                                     bool& degenerate, Diagnostics* diag) {
  log_sum.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    log_sum[j] = a[j] + b[j];
  }
  try {
    degenerate = false;
    return normalized_weights(log_sum);
  } catch (const AllWeightsZero&) {
    degenerate = true;
    if (diag != nullptr) {
      ++diag->degenerate_weights;
    }
    return forward_weights(record);
  }
}

GaussianMessage choose_moments(const GaussianMessage& g, Diagnostics* diag) {
  try {
    return g.complete(diag);
  } catch (const SingularPrecision&) {
    return g;
  }
}

Matrix process_precision(const ClgModel& model) {
  const auto w = spd_inverse(model.cov_nonlinear);
  if (!w) {
    throw NonPositiveNoise("C_w^N is not positive definite");
  }
  return *w;
}

}  // namespace

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  if (!(total > 0.0)) {
    throw AllWeightsZero("cannot sample from zero weights");
  }
  const double u = uniform01(rng) * total;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cumulative += weights[j];
    if (u < cumulative) {
      return j;
    }
  }
  // Rounding left u above the last partial sum: take the last positive weight.
  for (std::size_t j = weights.size(); j-- > 0;) {
    if (weights[j] > 0.0) {
      return j;
    }
  }
  return weights.size() - 1;
}

std::vector<double> forward_weights(const ForwardRecord& record) {
  return normalized_weights(record.cloud.weights(WeightKind::fe));
}

BackwardState init_terminal(const StepInputs& in, const BackwardConfig& config, Rng& rng,
                            Diagnostics* diag) {
  const ForwardRecord& rec = in.record;
  BackwardState s{rec.step, rec.ekf_estimate, Vector(), kNoIndex};
  if (config.terminal == TerminalInit::measurement_only) {
    s.be_gauss = choose_moments(
        measurement_message(rec.linearization, in.y, in.model.cov_measurement, diag), diag);
  }
  const std::vector<double> w = forward_weights(rec);
  if (config.mode == SmootherMode::joint) {
    s.chosen_index = sample_index(w, rng);
    s.be_particle = rec.cloud.particles[s.chosen_index];
  } else {
    s.be_particle = weighted_mean(rec.cloud.particles, w);
  }
  return s;
}

Phase1Result phase1(const BackwardState& next, const StepInputs& in, Diagnostics* diag) {
  const ClgModel& model = in.model;
  const LinearizedModel& lin = in.record.linearization;
  Phase1Result r{backward_predict(next.be_gauss, lin.transition, lin.offset, model.process_cov(),
                                  diag),
                 std::nullopt,
                 {}};
  if (next.be_gauss.has_moments()) {
    r.be_linear_next = marginalize(next.be_gauss, IndexRange::leading(model.dim_linear), diag);
  }
  const Matrix w_nonlinear = process_precision(model);
  const std::size_t np = in.record.cloud.size();
  r.pm.z.reserve(np);
  r.pm.pm_gauss.reserve(np);
  for (std::size_t j = 0; j < np; ++j) {
    r.pm.z.push_back(next.be_particle - in.blocks[j].f_nonlinear);
    r.pm.pm_gauss.push_back(
        linear_pseudo_measurement(in.blocks[j], next.be_particle, w_nonlinear));
  }
  return r;
}

bool phase2_step1(const Phase1Result& p1, const StepInputs& in, const IterationScratch& prev,
                  bool exchange, IterationScratch& out, Diagnostics* diag) {
  bool degenerate = false;
  out.k = prev.k + 1;
  out.w_sm = smoothed_weights(prev.log_w_fe1, prev.log_w_be1, in.record, out.log_w_sm, degenerate,
                              diag);
  const Index d = in.model.dim();
  if (!exchange) {
    out.m_pm = GaussianMessage::flat(d);
    return !degenerate;
  }
  const auto& particles = in.record.cloud.particles;
  std::vector<PairComponent> comps;
  comps.reserve(particles.size());
  for (std::size_t j = 0; j < particles.size(); ++j) {
    comps.push_back({p1.pm.pm_gauss[j], particles[j]});
  }
  out.m_pm = moment_match(out.w_sm, comps, diag);
  return !degenerate;
}

void phase2_step2(const Phase1Result& p1, const StepInputs& in, IterationScratch& it,
                  Diagnostics* diag) {
  it.m_be1 = product(p1.bp, *it.m_pm, diag);
  it.m_sm = product(in.record.ekf_estimate, *it.m_be1, diag).complete(diag);
  it.m_sm_linear = marginalize(*it.m_sm, IndexRange::leading(in.model.dim_linear), diag);
}

void phase2_step3(const Phase1Result& p1, const StepInputs& in, bool exchange,
                  IterationScratch& it, Diagnostics* diag) {
  const std::size_t np = in.record.cloud.size();
  it.log_w_pm.assign(np, 0.0);
  if (!exchange) {
    return;
  }
  if (!p1.be_linear_next) {
    if (diag != nullptr) {
      ++diag->degenerate_weights;
    }
    return;
  }
  const LinearBeliefPair beliefs{&*p1.be_linear_next, &*it.m_sm_linear};
  for (std::size_t j = 0; j < np; ++j) {
    it.log_w_pm[j] = log_nonlinear_pseudo_weight(in.blocks[j], beliefs, in.model.cov_linear, diag);
  }
}

void phase2_step4(const BackwardState& next, const StepInputs& in, IterationScratch& it,
                  Diagnostics* diag) {
  const std::size_t np = in.record.cloud.size();
  it.log_w_bp.resize(np);
  it.log_w_be1.resize(np);
  for (std::size_t j = 0; j < np; ++j) {
    it.log_w_bp[j] = log_transition_weight(in.blocks[j], next.be_particle, *it.m_sm_linear,
                                           in.model.cov_nonlinear, diag);
    it.log_w_be1[j] = it.log_w_bp[j] + it.log_w_pm[j];
  }
}

void phase2_step5(const StepInputs& in, IterationScratch& it, Diagnostics* diag) {
  const std::size_t np = in.record.cloud.size();
  it.log_w_fe1.resize(np);
  for (std::size_t j = 0; j < np; ++j) {
    it.log_w_fe1[j] = log_measurement_weight(in.blocks[j], in.y, *it.m_sm_linear,
                                             in.model.cov_measurement, diag);
  }
}

Phase3Result phase3(const IterationScratch& last, const Phase1Result& p1, const StepInputs& in,
                    const BackwardConfig& config, Rng& rng, Diagnostics* diag) {
  const ForwardRecord& rec = in.record;
  IterationScratch fin;
  const bool ok = phase2_step1(p1, in, last, config.exchange, fin, diag);

  BackwardState state{rec.step, rec.ekf_estimate, Vector(), kNoIndex};
  if (config.mode == SmootherMode::joint) {
    state.chosen_index = sample_index(fin.w_sm, rng);
    state.be_particle = rec.cloud.particles[state.chosen_index];
  } else {
    state.be_particle = weighted_mean(rec.cloud.particles, fin.w_sm);
  }

  GaussianMessage be1 = product(p1.bp, *fin.m_pm, diag);
  GaussianMessage sm = product(rec.ekf_estimate, be1, diag).complete(diag);
  const GaussianMessage ms =
      measurement_message(rec.linearization, in.y, in.model.cov_measurement, diag);
  state.be_gauss = choose_moments(product(be1, ms, diag), diag);
  return {std::move(state), std::move(fin.w_sm), std::move(sm), std::move(be1), !ok};
}

std::vector<std::vector<ParticleBlocks>> record_blocks(const ClgModel& model,
                                                       const std::vector<ForwardRecord>& records) {
  std::vector<std::vector<ParticleBlocks>> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(evaluate_blocks(model, r.cloud.particles));
  }
  return out;
}

BackwardPass run_backward(const ClgModel& model, const std::vector<ForwardRecord>& records,
                          std::span<const Vector> measurements, const BackwardConfig& config,
                          const std::vector<std::vector<ParticleBlocks>>* blocks) {
  if (records.empty() || records.size() != measurements.size()) {
    throw LengthMismatch("records and measurements must be non-empty and of equal length");
  }
  if (config.iterations < 0) {
    throw DimensionMismatch("iteration count must be non-negative");
  }
  std::vector<std::vector<ParticleBlocks>> local;
  if (blocks == nullptr) {
    local = record_blocks(model, records);
    blocks = &local;
  }
  const std::size_t horizon = records.size();
  Rng rng(config.seed);
  BackwardPass out;

  // Built last step first, reversed at the end.
  std::vector<BackwardState> states;
  std::vector<std::vector<double>> weights;
  std::vector<GaussianMessage> smoothed;
  std::vector<GaussianMessage> be1s;
  std::vector<StepDiagnostics> steps;

  {
    const std::size_t l = horizon - 1;
    StepDiagnostics sd;
    sd.step = l + 1;
    try {
      const StepInputs in{model, records[l], (*blocks)[l], measurements[l]};
      states.push_back(init_terminal(in, config, rng, &sd.counters));
      weights.push_back(forward_weights(records[l]));
      smoothed.push_back(records[l].ekf_estimate);
      be1s.push_back(GaussianMessage::flat(model.dim()));
    } catch (const Error& e) {
      throw StepFailure(l + 1, e.what());
    }
    sd.ess = effective_sample_size(weights.back());
    out.diagnostics += sd.counters;
    steps.push_back(sd);
  }

  for (std::size_t l = horizon - 1; l-- > 0;) {
    StepDiagnostics sd;
    sd.step = l + 1;
    Diagnostics* diag = &sd.counters;
    try {
      const StepInputs in{model, records[l], (*blocks)[l], measurements[l]};
      const BackwardState& next = states.back();
      const Phase1Result p1 = phase1(next, in, diag);

      IterationScratch prev;
      prev.log_w_fe1 = records[l].cloud.weights(WeightKind::fe);
      prev.log_w_be1.assign(records[l].cloud.size(), 0.0);
      for (int k = 1; k <= config.iterations; ++k) {
        IterationScratch it;
        if (!phase2_step1(p1, in, prev, config.exchange, it, diag)) {
          sd.degenerate = true;
        }
        phase2_step2(p1, in, it, diag);
        phase2_step3(p1, in, config.exchange, it, diag);
        phase2_step4(next, in, it, diag);
        if (config.weight_reuse) {
          it.log_w_fe1 = prev.log_w_fe1;
        } else {
          phase2_step5(in, it, diag);
        }
        prev = std::move(it);
      }
      Phase3Result p3 = phase3(prev, p1, in, config, rng, diag);
      sd.degenerate = sd.degenerate || p3.degenerate;
      sd.ess = effective_sample_size(p3.w_sm);
      states.push_back(std::move(p3.state));
      weights.push_back(std::move(p3.w_sm));
      smoothed.push_back(std::move(p3.m_sm));
      be1s.push_back(std::move(p3.m_be1));
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(l + 1, e.what());
    }
    out.diagnostics += sd.counters;
    steps.push_back(sd);
  }

  std::reverse(states.begin(), states.end());
  std::reverse(weights.begin(), weights.end());
  std::reverse(smoothed.begin(), smoothed.end());
  std::reverse(be1s.begin(), be1s.end());
  std::reverse(steps.begin(), steps.end());
  out.states = std::move(states);
  out.smoothed_weights = std::move(weights);
  out.smoothed = std::move(smoothed);
  out.backward_estimates = std::move(be1s);
  out.step_diagnostics = std::move(steps);
  return out;
}

void write_diagnostics_jsonl(std::ostream& out, std::span<const StepDiagnostics> steps,
                             std::optional<std::size_t> pass) {
  for (const auto& s : steps) {
    nlohmann::json j = {{"step", s.step},
                        {"psd_clamps", s.counters.psd_clamps},
                        {"jitter", s.counters.jitter_applications},
                        {"degenerate_weights", s.counters.degenerate_weights},
                        {"degenerate", s.degenerate},
                        {"ess", s.ess}};
    if (pass) {
      j["pass"] = *pass;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace turbosmooth
