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


// Random instances of the Gaussian message identities, each compared with an
// independent closed form or brute-force evaluation.

#ifndef TURBOSMOOTH_TESTS_SUPPORT_FORMULA_CASES_HPP
#define TURBOSMOOTH_TESTS_SUPPORT_FORMULA_CASES_HPP

#include <algorithm>
#include <random>
#include <vector>

#include "oracles/mixture.hpp"
#include "support/random_models.hpp"
#include "turbosmooth/gaussian.hpp"

namespace testing_support {

/// Worst relative error of backward_predict against F^T (C_w + C_be)^-1 [F, eta - u].
inline double backward_predict_cases(int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    const Index d = 1 + trial % 6;
    const Matrix f = random_matrix(rng, d, d);
    const Vector u = random_vector(rng, d);
    const Matrix cw = random_spd(rng, d);
    const Vector eta = random_vector(rng, d);
    const Matrix cbe = random_spd(rng, d);
    const auto bp = backward_predict(GaussianMessage::from_moments(eta, cbe), f, u, cw);
    const Matrix s = (cw + cbe).inverse();
    worst = std::max({worst, relative_error(bp.precision(), f.transpose() * s * f),
                      relative_error(bp.info(), f.transpose() * s * (eta - u))});
  }
  return worst;
}

/// Worst relative error between the canonical product of the backward
/// prediction with the pseudo-measurement and the covariance-form expression
/// C = (C_pm W_bp + I)^-1 C_pm, eta = (C_pm W_bp + I)^-1 (C_pm w_bp + eta_pm).
inline double alternative_form_cases(int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    const Index d = 1 + trial % 6;
    const Matrix w_bp = random_spd(rng, d);
    const Vector i_bp = random_vector(rng, d);
    const Matrix c_pm = random_spd(rng, d);
    const Vector eta_pm = random_vector(rng, d);
    const auto be1 = product(GaussianMessage::from_canonical(w_bp, i_bp),
                             GaussianMessage::from_moments(eta_pm, c_pm))
                         .to_moment();
    const Matrix wl = (c_pm * w_bp + Matrix::Identity(d, d)).inverse();
    worst = std::max({worst, relative_error(be1.cov(), wl * c_pm),
                      relative_error(be1.mean(), wl * (c_pm * i_bp + eta_pm))});
  }
  return worst;
}

/// Worst scaled error of moment_match against brute-force mixture moments.
inline double moment_match_cases(int count, std::uint64_t seed) {
  using namespace turbosmooth;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    const Index dl = 1 + trial % 3;
    const Index dn = 1 + (trial / 3) % 3;
    const std::size_t n = static_cast<std::size_t>(dl + dn + 2 + trial % 5);
    std::vector<double> w(n);
    std::vector<PairComponent> comps;
    std::vector<oracle::JointComponent> joint;
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = unit(rng);
      const Vector mean = random_vector(rng, dl);
      const Matrix cov = random_spd(rng, dl);
      const Vector point = random_vector(rng, dn);
      comps.push_back({GaussianMessage::from_moments(mean, cov), point});
      oracle::JointComponent jc;
      jc.mean.resize(dl + dn);
      jc.mean << mean, point;
      jc.cov = Matrix::Zero(dl + dn, dl + dn);
      jc.cov.topLeftCorner(dl, dl) = cov;
      joint.push_back(jc);
    }
    const auto g = moment_match(w, comps);
    const auto ref = oracle::mixture_moments(w, joint);
    worst = std::max({worst, (g.mean() - ref.mean).norm() / (1.0 + ref.mean.norm()),
                      (g.cov() - ref.cov).norm() / (1.0 + ref.cov.norm())});
  }
  return worst;
}

}  // namespace testing_support

#endif  // TURBOSMOOTH_TESTS_SUPPORT_FORMULA_CASES_HPP
