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

#include "turbosmooth/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "turbosmooth/errors.hpp"

namespace turbosmooth {

namespace {

constexpr double kJitterScale = 1e-9;
constexpr double kClampScale = 1e-12;

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

void require_square(const Matrix& a, Index dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                            std::to_string(dim) + ", got " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
}

}  // namespace

std::optional<Eigen::LLT<Matrix>> spd_factor(const Matrix& a, Diagnostics* diag) {
  if (a.rows() != a.cols() || a.rows() == 0 || !a.allFinite()) {
    return std::nullopt;
  }
  const Matrix sym = symmetrized(a);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    return llt;
  }
  const double jitter = kJitterScale * sym.trace() / static_cast<double>(sym.rows());
  if (!(jitter > 0.0) || !std::isfinite(jitter)) {
    return std::nullopt;
  }
  llt.compute(sym + jitter * Matrix::Identity(sym.rows(), sym.cols()));
  if (llt.info() != Eigen::Success) {
    return std::nullopt;
  }
  if (diag != nullptr) {
    ++diag->jitter_applications;
  }
  return llt;
}

std::optional<Matrix> spd_inverse(const Matrix& a, Diagnostics* diag) {
  auto llt = spd_factor(a, diag);
  if (!llt) {
    return std::nullopt;
  }
  Matrix inv = llt->solve(Matrix::Identity(a.rows(), a.cols()));
  return symmetrized(inv);
}

ClampResult clamp_psd(const Matrix& a, Diagnostics* diag) {
  Matrix sym = symmetrized(a);
  if (sym.size() == 0) {
    return {std::move(sym), false};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector& values = eig.eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  const double floor = kClampScale * scale;
  if (values.minCoeff() >= floor) {
    return {std::move(sym), false};
  }
  const Vector clamped = values.cwiseMax(floor);
  Matrix rebuilt = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  if (diag != nullptr) {
    ++diag->psd_clamps;
  }
  return {symmetrized(rebuilt), true};
}

// --- GaussianMessage --------------------------------------------------------

GaussianMessage GaussianMessage::from_moments(Vector mean, Matrix cov) {
  require_square(cov, mean.size(), "covariance");
  if (mean.size() == 0) {
    throw DimensionMismatch("Gaussian message must have positive dimension");
  }
  GaussianMessage g;
  g.dim_ = mean.size();
  g.mean_ = std::move(mean);
  g.cov_ = std::move(cov);
  return g;
}

GaussianMessage GaussianMessage::from_canonical(Matrix precision, Vector info) {
  require_square(precision, info.size(), "precision");
  if (info.size() == 0) {
    throw DimensionMismatch("Gaussian message must have positive dimension");
  }
  GaussianMessage g;
  g.dim_ = info.size();
  g.precision_ = std::move(precision);
  g.info_ = std::move(info);
  return g;
}

GaussianMessage GaussianMessage::from_both(Vector mean, Matrix cov, Matrix precision,
                                           Vector info) {
  GaussianMessage g = from_moments(std::move(mean), std::move(cov));
  require_square(precision, g.dim_, "precision");
  if (info.size() != g.dim_) {
    throw DimensionMismatch("information vector size does not match the mean");
  }
  g.precision_ = std::move(precision);
  g.info_ = std::move(info);
  return g;
}

GaussianMessage GaussianMessage::flat(Index dim) {
  return from_canonical(Matrix::Zero(dim, dim), Vector::Zero(dim));
}

const Vector& GaussianMessage::mean() const {
  if (!mean_) {
    throw SingularPrecision("message has no moment form");
  }
  return *mean_;
}

const Matrix& GaussianMessage::cov() const {
  if (!cov_) {
    throw SingularPrecision("message has no moment form");
  }
  return *cov_;
}

const Matrix& GaussianMessage::precision() const {
  if (!precision_) {
    throw DegenerateCovariance("message has no canonical form");
  }
  return *precision_;
}

const Vector& GaussianMessage::info() const {
  if (!info_) {
    throw DegenerateCovariance("message has no canonical form");
  }
  return *info_;
}

GaussianMessage GaussianMessage::to_canonical(Diagnostics* diag) const {
  if (has_canonical()) {
    return *this;
  }
  auto inv = spd_inverse(*cov_, diag);
  if (!inv) {
    throw DegenerateCovariance("covariance is not positive definite");
  }
  GaussianMessage g = *this;
  g.info_ = (*inv) * (*mean_);
  g.precision_ = std::move(*inv);
  return g;
}

GaussianMessage GaussianMessage::to_moment(Diagnostics* diag) const {
  if (has_moments()) {
    return *this;
  }
  auto llt = spd_factor(*precision_, diag);
  if (!llt) {
    throw SingularPrecision("precision matrix is not invertible");
  }
  GaussianMessage g = *this;
  g.cov_ = symmetrized(llt->solve(Matrix::Identity(dim_, dim_)));
  g.mean_ = llt->solve(*info_);
  return g;
}

GaussianMessage GaussianMessage::complete(Diagnostics* diag) const {
  return to_canonical(diag).to_moment(diag);
}

bool GaussianMessage::is_vacuous() const {
  return precision_.has_value() && precision_->isZero(0.0) && info_->isZero(0.0);
}

// --- algebra ----------------------------------------------------------------

GaussianMessage product(const GaussianMessage& a, const GaussianMessage& b, Diagnostics* diag) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("product of messages with dimensions " + std::to_string(a.dim()) +
                            " and " + std::to_string(b.dim()));
  }
  const GaussianMessage ca = a.to_canonical(diag);
  const GaussianMessage cb = b.to_canonical(diag);
  return GaussianMessage::from_canonical(ca.precision() + cb.precision(), ca.info() + cb.info());
}

GaussianMessage marginalize(const GaussianMessage& g, IndexRange keep, Diagnostics* diag) {
  const bool leading = keep.start == 0;
  const bool trailing = keep.start + keep.count == g.dim();
  if (keep.count <= 0 || keep.start < 0 || keep.start + keep.count > g.dim() ||
      !(leading || trailing)) {
    throw DimensionMismatch("marginalization block must be a leading or trailing range");
  }
  const GaussianMessage m = g.to_moment(diag);
  Vector mean = m.mean().segment(keep.start, keep.count);
  Matrix cov = m.cov().block(keep.start, keep.start, keep.count, keep.count);
  if (keep.count == g.dim() && m.has_canonical()) {
    return m;
  }
  return GaussianMessage::from_moments(std::move(mean), std::move(cov)).to_canonical(diag);
}

GaussianMessage backward_predict(const GaussianMessage& be_next, const Matrix& transition,
                                 const Vector& offset, const Matrix& process_cov,
                                 Diagnostics* diag) {
  const Index d = be_next.dim();
  require_square(transition, d, "transition matrix");
  require_square(process_cov, d, "process covariance");
  if (offset.size() != d) {
    throw DimensionMismatch("transition offset has wrong size");
  }
  Eigen::LLT<Matrix> noise_llt(symmetrized(process_cov));
  if (noise_llt.info() != Eigen::Success) {
    throw NonPositiveNoise("process covariance is not positive definite");
  }
  const Matrix identity = Matrix::Identity(d, d);
  const Matrix noise_precision = symmetrized(noise_llt.solve(identity));

  const GaussianMessage be = be_next.to_canonical(diag);
  const Matrix& w_be = be.precision();
  auto q = spd_inverse(noise_precision + w_be, diag);
  if (!q) {
    throw NonPositiveNoise("W_w + W_be is not positive definite");
  }
  const Matrix p = identity - w_be * (*q);
  Matrix precision = symmetrized(transition.transpose() * p * w_be * transition);
  Vector info = transition.transpose() * (p * be.info() - w_be * (*q) * noise_precision * offset);
  return GaussianMessage::from_canonical(std::move(precision), std::move(info));
}

GaussianMessage moment_match(std::span<const double> weights,
                             std::span<const PairComponent> components, Diagnostics* diag) {
  if (components.empty() || weights.size() != components.size()) {
    throw EmptyMixture("mixture has no components or mismatched weights");
  }
  const Index dl = components.front().linear.dim();
  const Index dn = components.front().point.size();
  const Index d = dl + dn;

  double total = 0.0;
  double total_informative = 0.0;
  std::vector<const GaussianMessage*> linear(components.size(), nullptr);
  std::vector<GaussianMessage> converted;
  converted.reserve(components.size());
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto& c = components[j];
    if (c.linear.dim() != dl || c.point.size() != dn) {
      throw DimensionMismatch("mixture components have inconsistent dimensions");
    }
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      throw EmptyMixture("mixture weight is negative or not finite");
    }
    total += weights[j];
    if (c.linear.has_moments()) {
      linear[j] = &c.linear;
    } else if (!c.linear.is_vacuous()) {
      converted.push_back(c.linear.to_moment(diag));
      linear[j] = &converted.back();
    }
    if (linear[j] != nullptr) {
      total_informative += weights[j];
    }
  }
  if (!(total > 0.0)) {
    throw EmptyMixture("mixture weights sum to zero");
  }

  Vector mean_n = Vector::Zero(dn);
  for (std::size_t j = 0; j < components.size(); ++j) {
    mean_n += (weights[j] / total) * components[j].point;
  }
  Matrix cov_nn = Matrix::Zero(dn, dn);
  for (std::size_t j = 0; j < components.size(); ++j) {
    const Vector dx = components[j].point - mean_n;
    cov_nn += (weights[j] / total) * dx * dx.transpose();
  }

  if (!(total_informative > 0.0)) {
    // Flat in the linear block: only the nonlinear statistics carry information.
    ClampResult nn = clamp_psd(cov_nn, diag);
    auto w_nn = spd_inverse(nn.matrix, diag);
    if (!w_nn || !nn.matrix.allFinite() || nn.matrix.isZero(0.0)) {
      throw DegenerateCovariance("nonlinear block of the projected mixture is singular");
    }
    Matrix precision = Matrix::Zero(d, d);
    Vector info = Vector::Zero(d);
    precision.bottomRightCorner(dn, dn) = *w_nn;
    info.tail(dn) = (*w_nn) * mean_n;
    return GaussianMessage::from_canonical(std::move(precision), std::move(info));
  }

  Vector mean_l = Vector::Zero(dl);
  Vector mean_n_informative = Vector::Zero(dn);
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (linear[j] != nullptr) {
      const double w = weights[j] / total_informative;
      mean_l += w * linear[j]->mean();
      mean_n_informative += w * components[j].point;
    }
  }
  Matrix cov_ll = Matrix::Zero(dl, dl);
  Matrix cov_ln = Matrix::Zero(dl, dn);
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (linear[j] != nullptr) {
      const double w = weights[j] / total_informative;
      const Vector dl_j = linear[j]->mean() - mean_l;
      cov_ll += w * (linear[j]->cov() + dl_j * dl_j.transpose());
      cov_ln += w * dl_j * (components[j].point - mean_n_informative).transpose();
    }
  }

  Vector mean(d);
  mean << mean_l, mean_n;
  Matrix cov(d, d);
  cov.topLeftCorner(dl, dl) = cov_ll;
  cov.topRightCorner(dl, dn) = cov_ln;
  cov.bottomLeftCorner(dn, dl) = cov_ln.transpose();
  cov.bottomRightCorner(dn, dn) = cov_nn;

  ClampResult clamped = clamp_psd(cov, diag);
  if (!clamped.matrix.allFinite() || clamped.matrix.isZero(0.0)) {
    throw DegenerateCovariance("projected mixture covariance is degenerate");
  }
  auto precision = spd_inverse(clamped.matrix, diag);
  if (!precision) {
    throw DegenerateCovariance("projected mixture covariance is singular after clamping");
  }
  Vector info = (*precision) * mean;
  return GaussianMessage::from_both(std::move(mean), std::move(clamped.matrix),
                                    std::move(*precision), std::move(info));
}

GaussianMessage collapse(const WeightedGaussianMixture& mixture, Diagnostics* diag) {
  if (mixture.components.empty() || mixture.weights.size() != mixture.components.size()) {
    throw EmptyMixture("mixture has no components or mismatched weights");
  }
  const Index d = mixture.components.front().dim();
  double total = 0.0;
  for (double w : mixture.weights) {
    total += w;
  }
  if (!(total > 0.0)) {
    throw EmptyMixture("mixture weights sum to zero");
  }
  std::vector<GaussianMessage> moments;
  moments.reserve(mixture.components.size());
  Vector mean = Vector::Zero(d);
  for (std::size_t j = 0; j < mixture.components.size(); ++j) {
    if (mixture.components[j].dim() != d) {
      throw DimensionMismatch("mixture components have inconsistent dimensions");
    }
    moments.push_back(mixture.components[j].to_moment(diag));
    mean += (mixture.weights[j] / total) * moments.back().mean();
  }
  Matrix cov = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < moments.size(); ++j) {
    const Vector dx = moments[j].mean() - mean;
    cov += (mixture.weights[j] / total) * (moments[j].cov() + dx * dx.transpose());
  }
  return GaussianMessage::from_moments(std::move(mean), clamp_psd(cov, diag).matrix);
}

double log_gaussian_eval(const Vector& x, const Vector& mean, const Matrix& cov,
                         Diagnostics* diag) {
  if (x.size() != mean.size() || cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw DimensionMismatch("log_gaussian_eval: inconsistent dimensions");
  }
  auto llt = spd_factor(cov, diag);
  if (!llt) {
    throw DegenerateCovariance("covariance is not positive definite");
  }
  const Matrix l = llt->matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const Vector r = llt->matrixL().solve(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + r.squaredNorm());
}

double log_gaussian_eval(const Vector& x, const GaussianMessage& g, Diagnostics* diag) {
  const GaussianMessage m = g.to_moment(diag);
  return log_gaussian_eval(x, m.mean(), m.cov(), diag);
}

void normalize_log_weights(std::span<double> log_weights) {
  double max = -std::numeric_limits<double>::infinity();
  for (double& v : log_weights) {
    if (std::isnan(v)) {
      v = -std::numeric_limits<double>::infinity();
    }
    max = std::max(max, v);
  }
  if (!std::isfinite(max)) {
    throw AllWeightsZero("no particle weight is finite");
  }
  double sum = 0.0;
  for (double v : log_weights) {
    sum += std::exp(v - max);
  }
  const double shift = max + std::log(sum);
  for (double& v : log_weights) {
    v -= shift;
  }
}

std::vector<double> normalized_weights(std::span<const double> log_weights) {
  std::vector<double> w(log_weights.begin(), log_weights.end());
  normalize_log_weights(w);
  for (double& v : w) {
    v = std::exp(v);
  }
  return w;
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) {
    s += w * w;
  }
  return s > 0.0 ? 1.0 / s : 0.0;
}

}  // namespace turbosmooth
