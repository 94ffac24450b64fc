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


// Random scalar- and two-dimensional instances of the particle weights,
// checked against direct numerical integration of their defining integrals.

#ifndef TURBOSMOOTH_TESTS_SUPPORT_QUADRATURE_CASES_HPP
#define TURBOSMOOTH_TESTS_SUPPORT_QUADRATURE_CASES_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles/quadrature.hpp"
#include "support/random_models.hpp"
#include "turbosmooth/particle_messages.hpp"

namespace testing_support {

struct QuadratureReport {
  double worst_convolution = 0.0;  // convolution form vs quadrature
  double worst_information = 0.0;  // information form vs quadrature
  int cases = 0;
};

inline double density2(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                       const Eigen::Matrix2d& cov) {
  const Eigen::Vector2d d = x - mean;
  return std::exp(-0.5 * d.dot(cov.inverse() * d)) /
         (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
}

inline turbosmooth::ParticleBlocks blocks_for(Index dl, Index dn, std::mt19937_64& rng) {
  turbosmooth::ParticleBlocks b;
  b.a_linear = random_matrix(rng, dl, dl, 0.7);
  b.a_nonlinear = random_matrix(rng, dn, dl, 0.7);
  b.b = random_matrix(rng, 1, dl);
  b.f_linear = random_vector(rng, dl, 0.5);
  b.f_nonlinear = random_vector(rng, dn, 0.5);
  b.g = random_vector(rng, 1);
  return b;
}

/// Pseudo-measurement weight: integral over z of N(z; eta_z, C_z) N(z; f_L, C_w^L),
/// where (eta_z, C_z) come from the next-step and current linear beliefs.
inline QuadratureReport pseudo_weight_cases(Index dl, int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  QuadratureReport rep;
  for (int c = 0; c < count; ++c) {
    const ParticleBlocks blk = blocks_for(dl, 1, rng);
    const Matrix c_cur = random_spd(rng, dl, 0.2, 0.5);
    const Matrix extra = random_spd(rng, dl, 0.2, 0.5);
    const Matrix c_next = blk.a_linear * c_cur * blk.a_linear.transpose() + extra;
    const auto cur = GaussianMessage::from_moments(random_vector(rng, dl), c_cur);
    const auto next = GaussianMessage::from_moments(random_vector(rng, dl), c_next);
    const Matrix c_w = random_spd(rng, dl, 0.2, 0.5);

    const double conv = std::exp(log_nonlinear_pseudo_weight(blk, {&next, &cur}, c_w));
    const double info =
        std::exp(log_nonlinear_pseudo_weight_information(blk, {&next, &cur}, c_w));

    const Vector eta_z = next.mean() - blk.a_linear * cur.mean();
    const Matrix c_z = c_next - blk.a_linear * c_cur * blk.a_linear.transpose();
    double quad = 0.0;
    if (dl == 1) {
      // The integrand is proportional to a Gaussian centred at m_star.
      const double c_star = 1.0 / (1.0 / c_z(0, 0) + 1.0 / c_w(0, 0));
      const double m_star = c_star * (eta_z[0] / c_z(0, 0) + blk.f_linear[0] / c_w(0, 0));
      const double half = 14.0 * std::sqrt(c_star);
      auto integrand = [&](double z) {
        return oracle::normal_pdf(z, eta_z[0], c_z(0, 0)) *
               oracle::normal_pdf(z, blk.f_linear[0], c_w(0, 0));
      };
      quad = oracle::integrate_scaled(integrand, m_star - half, m_star + half, 1e-13);
    } else {
      const Eigen::Matrix2d cz = c_z;
      const Eigen::Matrix2d cw = c_w;
      const Eigen::Vector2d ez = eta_z;
      const Eigen::Vector2d fl = blk.f_linear;
      // The integrand is proportional to a Gaussian with this mean and covariance.
      const Eigen::Matrix2d c_star = (cz.inverse() + cw.inverse()).inverse();
      const Eigen::Vector2d m_star = c_star * (cz.inverse() * ez + cw.inverse() * fl);
      const double sx = 10.0 * std::sqrt(c_star(0, 0));
      const double sy = 10.0 * std::sqrt(c_star(1, 1));
      const double peak = density2(m_star, ez, cz) * density2(m_star, fl, cw);
      quad = oracle::integrate2(
          [&](double x, double y) {
            const Eigen::Vector2d z(x, y);
            return density2(z, ez, cz) * density2(z, fl, cw);
          },
          m_star[0] - sx, m_star[0] + sx, m_star[1] - sy, m_star[1] + sy,
          1e-11 * peak * 4.0 * sx * sy);
    }
    rep.worst_convolution = std::max(rep.worst_convolution, std::abs(conv - quad) / quad);
    rep.worst_information = std::max(rep.worst_information, std::abs(info - quad) / quad);
    ++rep.cases;
  }
  return rep;
}

/// Backward transition weight: integral over x^L of
/// N(x^L; eta_sm, C_sm) N(x_be; A_N x^L + f_N, C_w^N).
inline QuadratureReport transition_weight_cases(Index dl, int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  QuadratureReport rep;
  for (int c = 0; c < count; ++c) {
    const ParticleBlocks blk = blocks_for(dl, 1, rng);
    const auto sm = GaussianMessage::from_moments(random_vector(rng, dl), random_spd(rng, dl, 0.2, 0.5));
    const Matrix c_w = random_spd(rng, 1, 0.2, 0.5);
    const Vector eta1 = blk.a_nonlinear * sm.mean() + blk.f_nonlinear;
    const Vector target = eta1 + random_vector(rng, 1, 0.8);
    const double lib = std::exp(log_transition_weight(blk, target, sm, c_w));

    auto kernel = [&](const Vector& x) {
      const double mean = (blk.a_nonlinear * x + blk.f_nonlinear)[0];
      return oracle::normal_pdf(target[0], mean, c_w(0, 0));
    };
    double quad = 0.0;
    if (dl == 1) {
      const double m = sm.mean()[0];
      const double s = std::sqrt(sm.cov()(0, 0));
      quad = oracle::integrate_scaled(
          [&](double x) {
            return oracle::normal_pdf(x, m, sm.cov()(0, 0)) * kernel(Vector::Constant(1, x));
          },
          m - 14.0 * s, m + 14.0 * s, 1e-13);
    } else {
      const Eigen::Matrix2d cs = sm.cov();
      const Eigen::Vector2d ms = sm.mean();
      const double sx = 12.0 * std::sqrt(cs(0, 0));
      const double sy = 12.0 * std::sqrt(cs(1, 1));
      const double peak = density2(ms, ms, cs) / std::sqrt(2.0 * std::numbers::pi * c_w(0, 0));
      quad = oracle::integrate2(
          [&](double x, double y) {
            const Eigen::Vector2d p(x, y);
            return density2(p, ms, cs) * kernel(Vector(p));
          },
          ms[0] - sx, ms[0] + sx, ms[1] - sy, ms[1] + sy, 1e-11 * peak * 4.0 * sx * sy);
    }
    rep.worst_convolution = std::max(rep.worst_convolution, std::abs(lib - quad) / quad);
    ++rep.cases;
  }
  return rep;
}

/// Measurement weight: integral over x^L of N(x^L; eta_sm, C_sm) N(y; B x^L + g, C_e).
inline QuadratureReport measurement_weight_cases(int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  QuadratureReport rep;
  for (int c = 0; c < count; ++c) {
    const ParticleBlocks blk = blocks_for(1, 1, rng);
    const auto sm = GaussianMessage::from_moments(random_vector(rng, 1), random_spd(rng, 1, 0.2, 0.5));
    const Matrix c_e = random_spd(rng, 1, 0.2, 0.5);
    const Vector y = blk.b * sm.mean() + blk.g + random_vector(rng, 1, 0.8);
    const double lib = std::exp(log_measurement_weight(blk, y, sm, c_e));
    const double m = sm.mean()[0];
    const double s = std::sqrt(sm.cov()(0, 0));
    const double quad = oracle::integrate_scaled(
        [&](double x) {
          return oracle::normal_pdf(x, m, sm.cov()(0, 0)) *
                 oracle::normal_pdf(y[0], blk.b(0, 0) * x + blk.g[0], c_e(0, 0));
        },
        m - 14.0 * s, m + 14.0 * s, 1e-13);
    rep.worst_convolution = std::max(rep.worst_convolution, std::abs(lib - quad) / quad);
    ++rep.cases;
  }
  return rep;
}

}  // namespace testing_support

#endif  // TURBOSMOOTH_TESTS_SUPPORT_QUADRATURE_CASES_HPP
