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

#include "turbosmooth/forward.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "turbosmooth/errors.hpp"
#include "turbosmooth/particle_messages.hpp"
#include "turbosmooth/trajectory_io.hpp"

namespace turbosmooth {

namespace {

Matrix sqrt_factor(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(0.5 * (cov + cov.transpose()));
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector standard_normal(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  return v;
}

/// Normalized linear weights; uniform (and counted) when all underflow.
std::vector<double> safe_weights(std::span<const double> log_weights, Diagnostics* diag) {
  try {
    return normalized_weights(log_weights);
  } catch (const AllWeightsZero&) {
    if (diag != nullptr) {
      ++diag->degenerate_weights;
    }
    return std::vector<double>(log_weights.size(), 1.0 / static_cast<double>(log_weights.size()));
  }
}

void normalize_or_uniform(std::vector<double>& log_weights, Diagnostics* diag) {
  try {
    normalize_log_weights(log_weights);
  } catch (const AllWeightsZero&) {
    if (diag != nullptr) {
      ++diag->degenerate_weights;
    }
    const double u = -std::log(static_cast<double>(log_weights.size()));
    std::fill(log_weights.begin(), log_weights.end(), u);
  }
}

Vector weighted_mean(const std::vector<Vector>& points, std::span<const double> weights) {
  Vector m = Vector::Zero(points.front().size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    m += weights[j] * points[j];
  }
  return m;
}

}  // namespace

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::fe:
      return "fe";
    case WeightKind::sm:
      return "sm";
    case WeightKind::bp:
      return "bp";
    case WeightKind::pm:
      return "pm";
    case WeightKind::be1:
      return "be1";
    case WeightKind::ms:
      return "ms";
  }
  return "?";
}

const std::vector<double>& ParticleCloud::weights(WeightKind kind) const {
  auto it = log_weights.find(kind);
  if (it == log_weights.end()) {
    throw std::out_of_range("particle cloud has no '" + std::string(to_string(kind)) +
                            "' weights");
  }
  return it->second;
}

GaussianMessage ekf_predict(const GaussianMessage& estimate, const ClgModel& model,
                            const LinearizedModel& lin, Diagnostics* diag) {
  const GaussianMessage m = estimate.to_moment(diag);
  const Matrix& f = lin.transition;
  Matrix cov = f * m.cov() * f.transpose() + model.process_cov();
  cov = 0.5 * (cov + cov.transpose());
  return GaussianMessage::from_moments(full_drift(model, m.mean()), std::move(cov))
      .to_canonical(diag);
}

GaussianMessage measurement_message(const LinearizedModel& lin, const Vector& y,
                                    const Matrix& cov_measurement, Diagnostics* diag) {
  if (y.size() != lin.measurement.cols() || cov_measurement.rows() != y.size()) {
    throw DimensionMismatch("measurement has wrong dimension");
  }
  const auto w_e = spd_inverse(cov_measurement, diag);
  if (!w_e) {
    throw NonPositiveNoise("measurement covariance is not positive definite");
  }
  const Matrix hw = lin.measurement * (*w_e);
  Matrix precision = hw * lin.measurement.transpose();
  precision = 0.5 * (precision + precision.transpose());
  return GaussianMessage::from_canonical(std::move(precision),
                                         hw * (y - lin.measurement_offset));
}

GaussianMessage ekf_update(const GaussianMessage& prediction, const Vector& y,
                           const LinearizedModel& lin, const Matrix& cov_measurement,
                           Diagnostics* diag) {
  if (prediction.dim() != lin.measurement.rows()) {
    throw DimensionMismatch("prediction and measurement matrix disagree");
  }
  const GaussianMessage updated =
      product(prediction, measurement_message(lin, y, cov_measurement, diag), diag);
  try {
    return updated.to_moment(diag);
  } catch (const SingularPrecision&) {
    return updated;
  }
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng) {
  const std::size_t n = weights.size();
  if (n == 0) {
    throw EmptyMixture("cannot resample an empty cloud");
  }
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw AllWeightsZero("resampling weights sum to zero");
  }
  std::vector<std::size_t> out(count);
  const double step = 1.0 / static_cast<double>(count);
  const double u0 = uniform01(rng) * step;
  std::size_t j = 0;
  double cumulative = weights[0] / total;
  for (std::size_t i = 0; i < count; ++i) {
    const double target = u0 + static_cast<double>(i) * step;
    while (cumulative < target && j + 1 < n) {
      ++j;
      cumulative += weights[j] / total;
    }
    out[i] = j;
  }
  return out;
}

ParticleCloud pf_propagate(const ParticleCloud& cloud, std::span<const double> resample_log_weights,
                           const GaussianMessage& linear_belief, const ClgModel& model, Rng& rng,
                           Diagnostics* diag) {
  const std::size_t n = cloud.size();
  const std::vector<double> w = safe_weights(resample_log_weights, diag);
  const GaussianMessage belief = linear_belief.to_moment(diag);

  ParticleCloud next;
  next.ancestors = systematic_resample(w, n, rng);
  next.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ParticleBlocks blk = evaluate_blocks(model, cloud.particles[next.ancestors[i]]);
    const Vector mean = blk.a_nonlinear * belief.mean() + blk.f_nonlinear;
    const Matrix cov =
        blk.a_nonlinear * belief.cov() * blk.a_nonlinear.transpose() + model.cov_nonlinear;
    next.particles.push_back(mean + sqrt_factor(cov) * standard_normal(mean.size(), rng));
  }
  next.log_weights[WeightKind::fe] =
      std::vector<double>(n, -std::log(static_cast<double>(n)));
  return next;
}

ParticleCloud pf_propagate(const ParticleCloud& cloud, const GaussianMessage& linear_belief,
                           const ClgModel& model, Rng& rng, Diagnostics* diag) {
  return pf_propagate(cloud, cloud.weights(WeightKind::fe), linear_belief, model, rng, diag);
}

void pf_weight_update(ParticleCloud& cloud, const Vector& y, const GaussianMessage& linear_belief,
                      const ClgModel& model, Diagnostics* diag) {
  const GaussianMessage belief = linear_belief.to_moment(diag);
  auto& fe = cloud.log_weights[WeightKind::fe];
  fe.resize(cloud.size(), 0.0);
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const ParticleBlocks blk = evaluate_blocks(model, cloud.particles[j]);
    fe[j] += log_measurement_weight(blk, y, belief, model.cov_measurement, diag);
  }
  normalize_log_weights(fe);
}

ForwardPass run_forward(const ClgModel& model, std::span<const Vector> measurements,
                        const ForwardConfig& config) {
  model.validate();
  if (measurements.empty()) {
    throw LengthMismatch("no measurements");
  }
  if (config.num_particles == 0) {
    throw DimensionMismatch("at least one particle is required");
  }
  const std::size_t horizon = measurements.size();
  const std::size_t np = config.num_particles;
  const Index dl = model.dim_linear;
  const Index dn = model.dim_nonlinear;
  const IndexRange linear_block = IndexRange::leading(dl);
  const bool turbo = config.mode == FilterMode::turbo && config.exchange_iterations > 0;
  const auto w_nonlinear = spd_inverse(model.cov_nonlinear);
  if (!w_nonlinear) {
    throw NonPositiveNoise("C_w^N is not positive definite");
  }

  ForwardPass out;
  Diagnostics* diag = &out.diagnostics;
  out.records.reserve(horizon);
  Rng rng(config.seed);

  GaussianMessage prediction = model.prior.complete(diag);
  ParticleCloud cloud;
  {
    const GaussianMessage prior_n = marginalize(prediction, IndexRange::trailing(model.dim(), dn));
    const Matrix s = sqrt_factor(prior_n.cov());
    cloud.particles.reserve(np);
    for (std::size_t j = 0; j < np; ++j) {
      cloud.particles.push_back(prior_n.mean() + s * standard_normal(dn, rng));
    }
  }
  std::vector<double> pre(np, 0.0);

  for (std::size_t l = 0; l < horizon; ++l) {
    try {
      const Vector& y = measurements[l];
      LinearizedModel lin;
      linearize_measurement(model, prediction.mean(), lin);
      const GaussianMessage estimate =
          ekf_update(prediction, y, lin, model.cov_measurement, diag).complete(diag);

      const std::vector<ParticleBlocks> blocks = evaluate_blocks(model, cloud.particles);
      const GaussianMessage predicted_linear = marginalize(prediction, linear_block, diag);
      std::vector<double> meas(np);
      std::vector<double> resample(np);
      for (std::size_t j = 0; j < np; ++j) {
        meas[j] = log_measurement_weight(blocks[j], y, predicted_linear, model.cov_measurement, diag);
        resample[j] = pre[j] + meas[j];
      }
      normalize_or_uniform(meas, diag);
      normalize_or_uniform(resample, diag);
      std::vector<double> resample_w(np);
      for (std::size_t j = 0; j < np; ++j) {
        resample_w[j] = std::exp(resample[j]);
      }
      out.filtered_nonlinear.push_back(weighted_mean(cloud.particles, resample_w));

      cloud.log_weights[WeightKind::fe] = meas;
      cloud.log_weights[WeightKind::pm] = pre;

      GaussianMessage fused = estimate;
      if (l + 1 == horizon) {
        linearize_drift(model, estimate.mean(), lin);
        out.filtered_linear.push_back(estimate.mean().head(dl));
        out.records.push_back({l + 1, prediction, estimate, std::move(cloud), std::move(lin)});
        break;
      }

      const GaussianMessage estimate_linear = marginalize(estimate, linear_block, diag);
      ParticleCloud children = pf_propagate(cloud, resample, estimate_linear, model, rng, diag);
      GaussianMessage next_prediction = prediction;
      std::vector<double> next_pre(np, 0.0);

      if (turbo) {
        std::vector<PairComponent> comps;
        comps.reserve(np);
        for (std::size_t i = 0; i < np; ++i) {
          const std::size_t parent = children.ancestors[i];
          comps.push_back({linear_pseudo_measurement(blocks[parent], children.particles[i],
                                                     *w_nonlinear),
                           cloud.particles[parent]});
        }
        std::vector<double> mix(np, 1.0 / static_cast<double>(np));
        for (int it = 0; it < config.exchange_iterations; ++it) {
          const GaussianMessage pm = moment_match(mix, comps, diag);
          fused = product(estimate, pm, diag).complete(diag);
          linearize_drift(model, fused.mean(), lin);
          next_prediction = ekf_predict(fused, model, lin, diag).complete(diag);
          const GaussianMessage fused_linear = marginalize(fused, linear_block, diag);
          const GaussianMessage next_linear = marginalize(next_prediction, linear_block, diag);
          for (std::size_t i = 0; i < np; ++i) {
            next_pre[i] = log_nonlinear_pseudo_weight(blocks[children.ancestors[i]],
                                                      {&next_linear, &fused_linear},
                                                      model.cov_linear, diag);
          }
          mix = safe_weights(next_pre, diag);
        }
      } else {
        linearize_drift(model, estimate.mean(), lin);
        next_prediction = ekf_predict(estimate, model, lin, diag).complete(diag);
      }

      out.filtered_linear.push_back(fused.mean().head(dl));
      out.records.push_back({l + 1, prediction, estimate, std::move(cloud), std::move(lin)});
      prediction = std::move(next_prediction);
      cloud = std::move(children);
      pre = std::move(next_pre);
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(l + 1, e.what());
    }
  }
  return out;
}

void dump_forward_records(const std::filesystem::path& dir,
                          const std::vector<ForwardRecord>& records) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream f(dir / name);
    if (!f) {
      throw Error("cannot write " + (dir / name).string());
    }
    return f;
  };
  auto put_matrix = [](std::ostream& os, const Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        os << ',' << format_double(m(r, c));
      }
    }
  };
  auto put_vector = [](std::ostream& os, const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) {
      os << ',' << format_double(v[i]);
    }
  };

  std::ofstream pred = open("ekf_prediction.csv");
  std::ofstream est = open("ekf_estimate.csv");
  std::ofstream parts = open("particles.csv");
  std::ofstream lin = open("linearization.csv");
  pred << "t,field,values...\n";
  est << "t,field,values...\n";
  parts << "t,j,ancestor,log_w_fe,log_w_pm,x_n...\n";
  lin << "t,field,values...\n";
  for (const auto& r : records) {
    pred << r.step << ",mean";
    put_vector(pred, r.ekf_prediction.mean());
    pred << '\n' << r.step << ",cov";
    put_matrix(pred, r.ekf_prediction.cov());
    pred << '\n';

    est << r.step << ",W";
    put_matrix(est, r.ekf_estimate.precision());
    est << '\n' << r.step << ",w";
    put_vector(est, r.ekf_estimate.info());
    est << '\n';

    const auto& fe = r.cloud.weights(WeightKind::fe);
    const auto pm_it = r.cloud.log_weights.find(WeightKind::pm);
    for (std::size_t j = 0; j < r.cloud.size(); ++j) {
      parts << r.step << ',' << j << ','
            << (r.cloud.ancestors.empty() ? std::string("-1")
                                          : std::to_string(r.cloud.ancestors[j]))
            << ',' << format_double(fe[j]) << ','
            << format_double(pm_it == r.cloud.log_weights.end() ? 0.0 : pm_it->second[j]);
      put_vector(parts, r.cloud.particles[j]);
      parts << '\n';
    }

    lin << r.step << ",F";
    put_matrix(lin, r.linearization.transition);
    lin << '\n' << r.step << ",u";
    put_vector(lin, r.linearization.offset);
    lin << '\n' << r.step << ",H";
    put_matrix(lin, r.linearization.measurement);
    lin << '\n' << r.step << ",v";
    put_vector(lin, r.linearization.measurement_offset);
    lin << '\n';
  }
}

}  // namespace turbosmooth
