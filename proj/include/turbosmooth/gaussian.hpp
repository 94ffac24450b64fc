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

#ifndef TURBOSMOOTH_GAUSSIAN_HPP
#define TURBOSMOOTH_GAUSSIAN_HPP

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace turbosmooth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Counters for the numerical safety nets of the message algebra.
///
/// Functions that may clamp or regularize accept an optional pointer to one
/// of these; a null pointer disables counting.
struct Diagnostics {
  int psd_clamps = 0;
  int jitter_applications = 0;
  int degenerate_weights = 0;

  Diagnostics& operator+=(const Diagnostics& other) {
    psd_clamps += other.psd_clamps;
    jitter_applications += other.jitter_applications;
    degenerate_weights += other.degenerate_weights;
    return *this;
  }
};

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// The input is symmetrized first. If the factorization fails, a single
/// diagonal jitter of 1e-9 * trace / dim is added and the factorization is
/// retried; std::nullopt is returned when that also fails.
std::optional<Eigen::LLT<Matrix>> spd_factor(const Matrix& a, Diagnostics* diag = nullptr);

/// Inverse of a symmetric positive-definite matrix under the jitter policy
/// of spd_factor().
std::optional<Matrix> spd_inverse(const Matrix& a, Diagnostics* diag = nullptr);

struct ClampResult {
  Matrix matrix;
  bool clamped = false;
};

/// Symmetrizes `a` and raises every eigenvalue below 1e-12 * lambda_max
/// (largest eigenvalue magnitude) to that floor.
ClampResult clamp_psd(const Matrix& a, Diagnostics* diag = nullptr);

/// A Gaussian density or likelihood in moment form (mean, covariance),
/// canonical form (precision W, information vector w = W * mean), or both.
///
/// A zero precision encodes a vacuous (flat) message, which has no moment
/// form. Instances are immutable.
class GaussianMessage {
 public:
  /// Builds a message from moments. Throws DimensionMismatch on bad shapes.
  static GaussianMessage from_moments(Vector mean, Matrix cov);
  /// Builds a message from canonical parameters.
  static GaussianMessage from_canonical(Matrix precision, Vector info);
  /// Both forms at once; the caller guarantees consistency.
  static GaussianMessage from_both(Vector mean, Matrix cov, Matrix precision, Vector info);
  static GaussianMessage flat(Index dim);

  [[nodiscard]] Index dim() const noexcept { return dim_; }
  [[nodiscard]] bool has_moments() const noexcept { return mean_.has_value(); }
  [[nodiscard]] bool has_canonical() const noexcept { return precision_.has_value(); }

  [[nodiscard]] const Vector& mean() const;
  [[nodiscard]] const Matrix& cov() const;
  [[nodiscard]] const Matrix& precision() const;
  [[nodiscard]] const Vector& info() const;

  /// Returns a copy carrying the canonical form, deriving it if needed.
  /// Throws DegenerateCovariance when the covariance cannot be inverted.
  [[nodiscard]] GaussianMessage to_canonical(Diagnostics* diag = nullptr) const;
  /// Returns a copy carrying the moment form, deriving it if needed.
  /// Throws SingularPrecision when the precision cannot be inverted.
  [[nodiscard]] GaussianMessage to_moment(Diagnostics* diag = nullptr) const;
  /// Both forms present.
  [[nodiscard]] GaussianMessage complete(Diagnostics* diag = nullptr) const;

  /// True when the canonical form is exactly zero.
  [[nodiscard]] bool is_vacuous() const;

 private:
  GaussianMessage() = default;

  Index dim_ = 0;
  std::optional<Vector> mean_;
  std::optional<Matrix> cov_;
  std::optional<Matrix> precision_;
  std::optional<Vector> info_;
};

/// Product of two messages: canonical parameters add.
GaussianMessage product(const GaussianMessage& a, const GaussianMessage& b,
                        Diagnostics* diag = nullptr);

/// Contiguous block of state indices.
struct IndexRange {
  Index start = 0;
  Index count = 0;

  static IndexRange leading(Index n) { return {0, n}; }
  static IndexRange trailing(Index dim, Index n) { return {dim - n, n}; }
};

/// Marginal over a leading or trailing block of the state. Returns moment
/// and canonical forms.
GaussianMessage marginalize(const GaussianMessage& g, IndexRange keep,
                            Diagnostics* diag = nullptr);

/// One-step backward prediction through x' = F x + u + w, w ~ N(0, C_w).
///
/// Works entirely in canonical form so a singular F is fine:
///   Q = (W_w + W_be)^-1,  P = I - W_be Q,
///   W_bp = F^T P W_be F,  w_bp = F^T (P w_be - W_be Q W_w u).
/// Throws NonPositiveNoise when C_w is not positive definite.
GaussianMessage backward_predict(const GaussianMessage& be_next, const Matrix& transition,
                                 const Vector& offset, const Matrix& process_cov,
                                 Diagnostics* diag = nullptr);

/// Component of a mixture over (linear, nonlinear) state pairs: a Gaussian
/// in the linear block times a point mass in the nonlinear block.
struct PairComponent {
  /// Gaussian over the linear block; a vacuous message (zero precision) is
  /// allowed and contributes no linear-block information.
  GaussianMessage linear;
  Vector point;
};

/// Collapses sum_j weight_j * linear_j(x_L) * delta(x_N - point_j) into one
/// Gaussian over [x_L; x_N] preserving mean and covariance.
///
/// Vacuous linear components are left out of the linear and cross blocks;
/// when every component is vacuous the result is flat in x_L and carries
/// only the nonlinear-block statistics (canonical form only).
/// The covariance is symmetrized and clamped with clamp_psd().
GaussianMessage moment_match(std::span<const double> weights,
                             std::span<const PairComponent> components,
                             Diagnostics* diag = nullptr);

/// Mixture of full Gaussians.
struct WeightedGaussianMixture {
  std::vector<double> weights;
  std::vector<GaussianMessage> components;
};

/// Moment-matched collapse of a general mixture (moment form).
GaussianMessage collapse(const WeightedGaussianMixture& mixture, Diagnostics* diag = nullptr);

/// log N(x; mean, cov). Throws DegenerateCovariance if cov is not positive
/// definite after the jitter policy.
double log_gaussian_eval(const Vector& x, const GaussianMessage& g, Diagnostics* diag = nullptr);

/// log N(x; mean, cov) for raw moments.
double log_gaussian_eval(const Vector& x, const Vector& mean, const Matrix& cov,
                         Diagnostics* diag = nullptr);

/// Shifts log-weights so the largest is zero and subtracts log-sum-exp, in
/// place. Throws AllWeightsZero if no entry is finite.
void normalize_log_weights(std::span<double> log_weights);

/// Linear-domain normalized weights from (unnormalized) log-weights.
std::vector<double> normalized_weights(std::span<const double> log_weights);

/// 1 / sum w_j^2 of normalized weights.
double effective_sample_size(std::span<const double> weights);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_GAUSSIAN_HPP
